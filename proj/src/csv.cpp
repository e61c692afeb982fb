#include "mmenc/csv.hpp"

#include "mmenc/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include <unistd.h>

namespace mmenc {

namespace {

struct Table {
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> line_numbers;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view field, const std::filesystem::path& path, std::size_t line) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || ptr != end || field.empty())
        throw ParseError(path.string(), line, "not a number: '" + std::string(field) + "'");
    return v;
}

Table read_table(const std::filesystem::path& path, std::string_view expected_header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(path.string(), 1, "empty file");
    ++lineno;
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3); // BOM
    if (trim(line) != expected_header)
        throw ParseError(path.string(), lineno, "expected header '" + std::string(expected_header) + "'");
    const auto n_cols = static_cast<std::size_t>(std::count(expected_header.begin(), expected_header.end(), ',') + 1);

    Table t;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            row.push_back(parse_number(rest.substr(0, comma), path, lineno));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (row.size() != n_cols)
            throw ParseError(path.string(), lineno,
                             "expected " + std::to_string(n_cols) + " fields, got " + std::to_string(row.size()));
        for (double v : row)
            if (!std::isfinite(v)) throw ParseError(path.string(), lineno, "non-finite value");
        t.rows.push_back(std::move(row));
        t.line_numbers.push_back(lineno);
    }
    return t;
}

// First coordinate must be strictly ascending with uniform step (relative tolerance 1e-6).
double uniform_step(const Table& t, const std::filesystem::path& path) {
    if (t.rows.size() < 2) throw ParseError(path.string(), 0, "need at least 2 rows");
    const double first = t.rows.front()[0], last = t.rows.back()[0];
    const double step = (last - first) / static_cast<double>(t.rows.size() - 1);
    if (!(step > 0.0)) throw ParseError(path.string(), t.line_numbers[1], "axis must be strictly ascending");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double expected = first + static_cast<double>(i) * step;
        if (i > 0 && !(t.rows[i][0] > t.rows[i - 1][0]))
            throw ParseError(path.string(), t.line_numbers[i], "axis must be strictly ascending");
        if (std::abs(t.rows[i][0] - expected) > 1e-6 * step)
            throw ParseError(path.string(), t.line_numbers[i], "non-uniform spacing");
    }
    return step;
}

} // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string read_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
    return std::string(trim(line));
}

FrequencySweep read_sweep_csv(const std::filesystem::path& path) {
    const auto t = read_table(path, "freq_hz,re,im");
    const double step = uniform_step(t, path);
    FrequencySweep s;
    const double f0 = t.rows.front()[0];
    s.geometry = sweep_geometry(f0, f0 + step * static_cast<double>(t.rows.size()), t.rows.size());
    s.samples.reserve(t.rows.size());
    for (const auto& r : t.rows) s.samples.emplace_back(r[1], r[2]);
    s.label = path.stem().string();
    return s;
}

std::string format_sweep_csv(const FrequencySweep& sweep) {
    std::string out = "freq_hz,re,im\n";
    for (std::size_t i = 0; i < sweep.samples.size(); ++i) {
        out += format_double(sweep.geometry.frequency_hz(i));
        out += ',';
        out += format_double(sweep.samples[i].real());
        out += ',';
        out += format_double(sweep.samples[i].imag());
        out += '\n';
    }
    return out;
}

ImpulseResponse read_cir_csv(const std::filesystem::path& path) {
    const auto t = read_table(path, "time_s,re,im");
    ImpulseResponse c;
    c.sample_period_s = uniform_step(t, path);
    c.t0_s = t.rows.front()[0];
    c.samples.reserve(t.rows.size());
    for (const auto& r : t.rows) c.samples.emplace_back(r[1], r[2]);
    return c;
}

std::string format_cir_csv(const ImpulseResponse& cir) {
    std::string out = "time_s,re,im\n";
    for (std::size_t k = 0; k < cir.samples.size(); ++k) {
        out += format_double(cir.time_s(k));
        out += ',';
        out += format_double(cir.samples[k].real());
        out += ',';
        out += format_double(cir.samples[k].imag());
        out += '\n';
    }
    return out;
}

MultipathProfile read_profile_csv(const std::filesystem::path& path) {
    const auto t = read_table(path, "delay_s,power_linear");
    MultipathProfile p;
    p.threshold_db = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        if (!(r[1] > 0.0)) throw ParseError(path.string(), t.line_numbers[i], "power must be positive");
        if (!p.paths.empty() && !(r[0] > p.paths.back().delay_s))
            throw ParseError(path.string(), t.line_numbers[i], "delays must be strictly increasing");
        p.paths.push_back({r[0], r[1]});
    }
    return p;
}

std::string format_profile_csv(const MultipathProfile& profile) {
    std::string out = "delay_s,power_linear\n";
    for (const auto& p : profile.paths) {
        out += format_double(p.delay_s);
        out += ',';
        out += format_double(p.power);
        out += '\n';
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace mmenc
