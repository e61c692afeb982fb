#include "commands.hpp"
#include "oracles.hpp"

#include "mmenc/csv.hpp"
#include "mmenc/error.hpp"
#include "mmenc/model_json.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

using namespace mmenc;
using namespace mmenc::cli;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / "mmenc_test_cli" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

GlobalOptions opts(const fs::path& out, std::uint64_t seed = 0) {
    GlobalOptions g;
    g.out = out;
    g.seed = seed;
    return g;
}

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::string& args, const fs::path& dir) {
    const auto o = dir / "stdout.txt", e = dir / "stderr.txt";
    const std::string cmd = std::string(MMENC_EXE) + " " + args + " >" + o.string() + " 2>" + e.string();
    const int status = std::system(cmd.c_str());
    return {WEXITSTATUS(status), slurp(o), slurp(e)};
}

// short reference response inside the 50 ns gate, on a 0.2 ns grid
ImpulseResponse reference_cir(std::size_t n) {
    ImpulseResponse r{0.2e-9, 0.0, CVec(n)};
    Rng rng(1);
    std::normal_distribution<double> g;
    for (std::size_t k = 0; k < 30; ++k) r.samples[k] = cplx(g(rng), g(rng)) * std::exp(-double(k) / 6.0);
    return r;
}

} // namespace

TEST_CASE("cir: identity and known-channel recovery") {
    const auto dir = fresh_dir("cir");
    const std::size_t n = 2000;
    const auto rfl = reference_cir(n);
    const auto ref = cir_to_cfr(rfl, 57e9);
    write_file_atomic(dir / "ref.csv", format_sweep_csv(ref));

    auto g = opts(dir);
    g.window = Window::none;
    CirArgs a;
    a.sweeps = {dir / "ref.csv"};
    a.reference = dir / "ref.csv";
    const auto id = read_cir_csv(cmd_cir(g, a));
    CHECK(std::abs(id.samples[0] - cplx(1.0)) < 1e-9);
    double rest = 0.0;
    for (std::size_t k = 1; k < n; ++k) rest = std::max(rest, std::abs(id.samples[k]));
    CHECK(rest < 1e-9);

    CVec h(n);
    h[0] = 1.0;
    h[25] = cplx(0.3, -0.4);
    h[300] = 0.2;
    h[1200] = cplx(0, 0.05);
    const auto meas = oracle::circular_convolve(rfl.samples, h);
    write_file_atomic(dir / "meas.csv", format_sweep_csv(cir_to_cfr({0.2e-9, 0.0, meas}, 57e9)));
    a.sweeps = {dir / "meas.csv"};
    a.output = dir / "h.csv";
    const auto rec = read_cir_csv(cmd_cir(g, a));
    CHECK(oracle::nmse_db(rec.samples, h) < -40.0);

    // the Hann window leaves the main peak where it is
    g.window = Window::hann;
    a.output = dir / "h_hann.csv";
    const auto hann = read_cir_csv(cmd_cir(g, a));
    std::size_t arg = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(hann.samples[k]) > std::abs(hann.samples[arg])) arg = k;
    CHECK(arg == 0);

    // averaging two identical sweeps changes nothing
    a.sweeps = {dir / "meas.csv", dir / "meas.csv"};
    g.window = Window::none;
    a.output = dir / "h_avg.csv";
    CHECK(slurp(cmd_cir(g, a)) == slurp(dir / "h.csv"));
}

TEST_CASE("cir: malformed input and geometry mismatch") {
    const auto dir = fresh_dir("cir_bad");
    std::ofstream(dir / "bad.csv") << "freq_hz,re,im\n1e9,1,0\n2e9,1,0\n3e9,oops,0\n";
    CirArgs a;
    a.sweeps = {dir / "bad.csv"};
    try {
        cmd_cir(opts(dir), a);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }

    write_file_atomic(dir / "a.csv", format_sweep_csv(cir_to_cfr(reference_cir(100), 57e9)));
    write_file_atomic(dir / "b.csv", format_sweep_csv(cir_to_cfr(reference_cir(120), 57e9)));
    a.sweeps = {dir / "a.csv"};
    a.reference = dir / "b.csv";
    CHECK_THROWS_AS(cmd_cir(opts(dir), a), Error);
}

TEST_CASE("extract: single impulses and report schema") {
    const auto dir = fresh_dir("extract");
    for (int i = 0; i < 3; ++i) {
        ImpulseResponse h{0.2e-9, 0.0, CVec(50)};
        h.samples[5 + i] = 0.1 * (i + 1);
        write_file_atomic(dir / ("h" + std::to_string(i) + ".csv"), format_cir_csv(h));
    }
    ExtractArgs a;
    a.inputs = {dir / "h0.csv", dir / "h1.csv", dir / "h2.csv"};
    const auto r = cmd_extract(opts(dir), a);
    CHECK(r["rds"]["mean"] == 0.0);
    for (const auto& f : r["files"]) {
        CHECK(f["paths"] == 1);
        CHECK(f["rds_ns"] == 0.0);
    }
    for (const char* k : {"path_loss", "rds", "gamma", "arrivals", "files", "threshold_sweep"}) CHECK(r.contains(k));
    CHECK(r["path_loss"].is_null());
    CHECK(r["gamma"].contains("gaussian"));
    CHECK(r["gamma"].contains("gamma"));
    CHECK(r["gamma"].contains("weibull"));
    CHECK(r["arrivals"].is_null());
    CHECK(fs::exists(dir / "report.json"));

    a.path_loss = true;
    CHECK_THROWS_AS(cmd_extract(opts(dir), a), Error);
    for (int i = 0; i < 3; ++i)
        std::ofstream(dir / ("h" + std::to_string(i) + ".json")) << "{\"distance_m\": " << 0.2 * (i + 1) << "}";
    const auto p = cmd_extract(opts(dir), a);
    const auto& pl = p["path_loss"];
    for (const char* k : {"pl_d0", "alpha", "sigma"}) CHECK(pl.contains(k));
    // losses 20, 16.5, 14.4 dB at 0.2, 0.4, 0.6 m
    std::vector<PathLossSample> pts;
    for (int i = 0; i < 3; ++i) pts.push_back({0.2 * (i + 1), -10 * std::log10(0.01 * (i + 1) * (i + 1))});
    CHECK(pl["alpha"].get<double>() == doctest::Approx(fit_path_loss(pts).alpha));
}

TEST_CASE("synth: files, determinism and ensemble power") {
    const auto dir = fresh_dir("synth");
    SynthArgs s;
    s.model = "sc1";
    s.count = 200;
    s.distance_m = 0.5;
    const auto files = cmd_synth(opts(dir / "a", 7), s);
    CHECK(files.size() == 600);
    cmd_synth(opts(dir / "b", 7), s);
    for (const auto& f : {"sc1_00000_cir.csv", "sc1_00199_profile.csv", "sc1_00042_cir.json"})
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    SynthArgs one = s;
    one.count = 1;
    cmd_synth(opts(dir / "c", 8), one);
    CHECK(slurp(dir / "a" / "sc1_00000_cir.csv") != slurp(dir / "c" / "sc1_00000_cir.csv"));

    double mean = 0.0;
    for (std::size_t i = 0; i < 200; ++i) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "sc1_%05zu_cir", i);
        const auto side = read_json_file(dir / "a" / (std::string(stem) + ".json"));
        CHECK(side["model_label"] == "sc1");
        CHECK(side["distance_m"] == 0.5);
        const double gain = side["large_scale_gain_db"];
        mean += read_cir_csv(dir / "a" / (std::string(stem) + ".csv")).total_power() / std::pow(10.0, gain / 10) / 200;
    }
    CHECK(mean == doctest::Approx(1.0).epsilon(0.01));

    SynthArgs none = s;
    none.count = 0;
    CHECK(cmd_synth(opts(dir / "d"), none).empty());
    SynthArgs bad = s;
    bad.model = "sc7";
    CHECK_THROWS_AS(cmd_synth(opts(dir), bad), Error);

    SynthArgs grid = s;
    grid.grid = "sc3";
    CHECK(cmd_synth(opts(dir / "g"), grid).size() == 72 * 3);

    SynthArgs sv = s;
    sv.model = "cm1";
    sv.count = 2;
    CHECK(cmd_synth(opts(dir / "sv"), sv).size() == 6);
}

TEST_CASE("design: table rows and constraint margins") {
    const auto dir = fresh_dir("design");
    struct Row {
        std::size_t cp, n, nu;
        double rate_gbps, latency_us;
    };
    const std::vector<Row> rows{{5000, 8192, 6720, 2.547, 2.638}, {3903, 8192, 6720, 2.778, 2.418},
                                {11, 131072, 107520, 4.101, 26.216}};
    for (const auto& r : rows) {
        DesignArgs a;
        a.n_cp = r.cp;
        a.n_fft = r.n;
        a.n_user = r.nu;
        const auto j = cmd_design(opts(dir), a);
        CHECK(std::abs(j["rate_bps"].get<double>() / 1e9 - r.rate_gbps) < 0.002);
        CHECK(std::abs(j["latency_s"].get<double>() * 1e6 - r.latency_us) < 0.002);
        CHECK(j["constraints"]["doppler"]["margin"].is_null());
    }

    DesignArgs t;
    t.t_max_s = 1e-6;
    t.speed_mps = 10;
    const auto j = cmd_design(opts(dir), t);
    CHECK(j["config"]["n_cp"] == 5000);
    CHECK(j["constraints"]["cyclic_prefix"]["ok"] == true);
    CHECK(j["doppler_hz"].get<double>() == doctest::Approx(2001.4).epsilon(1e-3));

    MultipathProfile p{{{0.0, 1.0}, {780.6e-9, 0.01}}, 30};
    write_file_atomic(dir / "chan.csv", format_profile_csv(p));
    DesignArgs c;
    c.channel = dir / "chan.csv";
    CHECK(cmd_design(opts(dir), c)["config"]["n_cp"] == 3903);

    DesignArgs inf;
    inf.t_max_s = 60e-6;
    CHECK_THROWS_AS(cmd_design(opts(dir), inf), Error);
}

TEST_CASE("ber: oracles, determinism and refusal") {
    const auto dir = fresh_dir("ber");
    BerArgs a;
    a.config = make_config(1, 0, 1, 1, 5e9);
    a.channel = "rayleigh:1";
    a.grid = "10";
    a.theory = true;
    const auto r = cmd_ber(opts(dir, 3), a);
    const auto& pt = r.curve.points.at(0);
    const double p = bpsk_rayleigh_ber(10.0);
    CHECK(std::abs(pt.ber - p) < 3 * oracle::binomial_sigma(p, double(pt.bits)));
    const auto text = slurp(r.path);
    CHECK(text.rfind("ebn0_db,ber,bits,errors,awgn_theory,rayleigh_theory\n", 0) == 0);

    a.output = dir / "again.csv";
    cmd_ber(opts(dir, 3), a);
    CHECK(slurp(dir / "again.csv") == text);

    BerArgs w;
    w.config = make_config(64, 0, 64, 1, 5e9);
    w.channel = "rayleigh:1";
    w.grid = "0";
    w.output = dir / "plain.csv";
    CHECK(slurp(cmd_ber(opts(dir), w).path).rfind("ebn0_db,ber,bits,errors\n", 0) == 0);

    BerArgs longer;
    longer.config = make_config(64, 4, 64, 1, 5e9);
    longer.channel = "rayleigh:9";
    try {
        cmd_ber(opts(dir), longer);
        FAIL("expected refusal");
    } catch (const Error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("9") != std::string::npos);
        CHECK(msg.find("5") != std::string::npos);
    }
    BerArgs sc;
    sc.config = make_config(8192, 3903, 6720, 1, 5e9);
    sc.channel = "sc1";
    CHECK_THROWS_AS(cmd_ber(opts(dir), sc), Error);
    sc.channel = "nowhere.csv";
    CHECK_THROWS_AS(cmd_ber(opts(dir), sc), Error);

    // design JSON drives the config
    DesignArgs d;
    d.n_fft = 64;
    d.n_user = 64;
    d.n_cp = 0;
    cmd_design(opts(dir), d);
    BerArgs via;
    via.design = dir / "design.json";
    via.grid = "0";
    via.stop = {100'000, 0, 100'000};
    CHECK(cmd_ber(opts(dir), via).curve.config.n_fft == 64);
}

TEST_CASE("executable: exit codes and single-line errors") {
    const auto dir = fresh_dir("exe");
    auto ok = run("preset list", dir);
    CHECK(ok.code == 0);
    CHECK(ok.out == "sc1\nsc2\nsc3\ncm1\ncm4\ncm9\n");

    auto shown = run("preset show sc2", dir);
    CHECK(shown.code == 0);
    CHECK(nlohmann::json::parse(shown.out)["gamma_dist"]["mu"] == 197.99);

    auto bad = run("synth nosuch", dir);
    CHECK(bad.code != 0);
    CHECK(bad.err.rfind("error: ", 0) == 0);
    CHECK(std::count(bad.err.begin(), bad.err.end(), '\n') == 1);

    auto usage = run("--bogus", dir);
    CHECK(usage.code != 0);
    CHECK(std::count(usage.err.begin(), usage.err.end(), '\n') == 1);

    const auto o1 = (dir / "o1").string(), o2 = (dir / "o2").string();
    CHECK(run("--seed 5 --out " + o1 + " synth sc2 -n 2", dir).code == 0);
    CHECK(run("synth sc2 -n 2 --seed 5 --out " + o2, dir).code == 0);
    CHECK(slurp(fs::path(o1) / "sc2_00001_cir.csv") == slurp(fs::path(o2) / "sc2_00001_cir.csv"));
    const std::string inputs = " extract " + o1 + "/sc2_00000_cir.csv " + o1 + "/sc2_00001_cir.csv";
    CHECK(run("--out " + o1 + inputs, dir).code == 0);
    // both realizations sit at the same distance
    auto degenerate = run("--out " + o1 + inputs + " --path-loss", dir);
    CHECK(degenerate.code == 1);
    CHECK(degenerate.err.find("degenerate") != std::string::npos);

    auto ber = run("--out " + o1 + " ber --n-fft 64 --n-user 64 --n-cp 2 --channel rayleigh:4 --ebn0 0:5:10", dir);
    CHECK(ber.code == 1);
    CHECK(ber.err.find("exceeds cyclic prefix") != std::string::npos);
}
