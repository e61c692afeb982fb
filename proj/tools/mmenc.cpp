#include "commands.hpp"

#include "mmenc/csv.hpp"
#include "mmenc/error.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace mmenc;
using namespace mmenc::cli;

namespace {

std::pair<double, double> parse_gate(const std::string& s) {
    const auto c = s.find(':');
    if (c == std::string::npos) throw Error("bad gate '" + s + "' (expected start_ns:stop_ns)");
    try {
        const double a = std::stod(s.substr(0, c)), b = std::stod(s.substr(c + 1));
        return {a * 1e-9, b * 1e-9};
    } catch (const std::exception&) {
        throw Error("bad gate '" + s + "' (expected start_ns:stop_ns)");
    }
}

std::string one_line(std::string s) {
    for (auto& ch : s)
        if (ch == '\n' || ch == '\r') ch = ' ';
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mmenc: 60 GHz metal-enclosure channel toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    std::string window = "hann";
    app.add_option("--seed", g.seed, "root seed for all random streams")->default_val(0);
    app.add_option("--out", g.out, "output directory")->default_val(".");
    app.add_option("--threshold-db", g.threshold_db, "path threshold below the peak, dB")->default_val(30.0);
    app.add_option("--window", window, "window on the CFR")->check(CLI::IsMember({"hann", "none"}))->default_val("hann");

    // cir
    CirArgs cir;
    std::string gate;
    std::string cir_output;
    auto* c_cir = app.add_subcommand("cir", "sweep CSV(s) to impulse response CSV");
    c_cir->add_option("sweeps", cir.sweeps, "sweep CSV files (several are averaged)")->required()->check(CLI::ExistingFile);
    c_cir->add_option("--reference", cir.reference, "free-space reference sweep CSV")->check(CLI::ExistingFile);
    c_cir->add_option("--gate", gate, "output gate start_ns:stop_ns");
    c_cir->add_option("--reference-distance", cir.reference_distance_m, "apply delay/attenuation correction for this reference distance, m");
    c_cir->add_option("--floor", cir.floor, "inverse-filter floor relative to the reference peak")->default_val(kDefaultInverseFilterFloor);
    c_cir->add_option("-o,--output", cir_output, "output CIR CSV");

    // extract
    ExtractArgs ex;
    auto* c_ex = app.add_subcommand("extract", "fit report from CIR or profile CSVs");
    c_ex->add_option("inputs", ex.inputs, "CIR or profile CSV files")->required()->check(CLI::ExistingFile);
    c_ex->add_flag("--path-loss", ex.path_loss, "fit path loss (needs distance_m sidecars or --grid)");
    c_ex->add_option("--grid", ex.grid, "take distances from a measurement grid, in input order")
        ->check(CLI::IsMember({"sc1", "sc2", "sc3"}));
    c_ex->add_option("--d0", ex.d0_m, "path-loss reference distance, m")->default_val(1.0);
    c_ex->add_option("--sweep-thresholds", ex.sweep_thresholds_db, "thresholds for the RDS sweep table, dB");
    c_ex->add_option("-o,--output", ex.output_name, "report file name inside --out")->default_val("report.json");

    // synth
    SynthArgs sy;
    auto* c_sy = app.add_subcommand("synth", "draw channel realizations");
    c_sy->add_option("model", sy.model, "preset name or model JSON")->required();
    c_sy->add_option("-n,--count", sy.count, "number of realizations")->default_val(1);
    c_sy->add_option("--distance", sy.distance_m, "Tx-Rx distance, m")->default_val(1.0);
    c_sy->add_option("--grid", sy.grid, "one realization per measurement-grid distance (overrides --count)")
        ->check(CLI::IsMember({"sc1", "sc2", "sc3"}));
    c_sy->add_option("--sample-period", sy.sample_period_s, "CIR sample period, s")->default_val(0.2e-9);
    c_sy->add_option("--horizon-db", sy.horizon_db, "generation horizon below the first path, dB");

    // design
    DesignArgs de;
    auto* c_de = app.add_subcommand("design", "OFDM rate, latency and constraint check");
    c_de->add_option("--bandwidth", de.bandwidth_hz, "B_w, Hz")->default_val(5e9);
    c_de->add_option("--n-fft", de.n_fft, "N")->default_val(8192);
    c_de->add_option("--n-user", de.n_user, "N_u")->default_val(6720);
    c_de->add_option("--bits", de.bits_per_symbol, "bits per subcarrier symbol")->default_val(1);
    c_de->add_option("--n-cp", de.n_cp, "N_cp (otherwise sized from the channel)");
    c_de->add_option("--t-max", de.t_max_s, "channel length, s");
    c_de->add_option("--channel", de.channel, "CIR or profile CSV")->check(CLI::ExistingFile);
    c_de->add_option("--cp-margin", de.cp_margin, "fractional CP margin")->default_val(0.0);
    c_de->add_option("--speed", de.speed_mps, "relative speed, m/s")->default_val(0.0);
    c_de->add_option("--carrier", de.carrier_hz, "carrier, Hz")->default_val(60e9);
    c_de->add_option("-o,--output", de.output_name, "report file name inside --out")->default_val("design.json");

    // ber
    BerArgs be;
    std::size_t n_fft = 8192, n_cp = 5000, n_user = 6720;
    int bits = 1;
    double bw = 5e9;
    std::string ber_output;
    auto* c_be = app.add_subcommand("ber", "Monte Carlo BER of uncoded OFDM");
    c_be->add_option("--design", be.design, "design JSON (from the design command)")->check(CLI::ExistingFile);
    c_be->add_option("--n-fft", n_fft, "N")->default_val(8192);
    c_be->add_option("--n-cp", n_cp, "N_cp")->default_val(5000);
    c_be->add_option("--n-user", n_user, "N_u")->default_val(6720);
    c_be->add_option("--bits", bits, "bits per subcarrier symbol (1 or 2)")->default_val(1);
    c_be->add_option("--bandwidth", bw, "B_w, Hz")->default_val(5e9);
    c_be->add_option("--channel", be.channel, "rayleigh:L, a preset name, a model JSON or a CIR CSV")->default_val("rayleigh:1");
    c_be->add_option("--horizon-db", be.horizon_db, "generation horizon for model channels, dB")->default_val(40.0);
    c_be->add_option("--ebn0", be.grid, "Eb/N0 grid start:step:stop, dB")->default_val("0:2:20");
    c_be->add_option("--min-bits", be.stop.min_bits)->default_val(be.stop.min_bits);
    c_be->add_option("--min-errors", be.stop.min_errors)->default_val(be.stop.min_errors);
    c_be->add_option("--max-bits", be.stop.max_bits)->default_val(be.stop.max_bits);
    c_be->add_flag("--theory", be.theory, "append closed-form AWGN and flat-Rayleigh columns");
    c_be->add_option("-o,--output", ber_output, "output CSV");

    // preset
    auto* c_pr = app.add_subcommand("preset", "built-in channel models");
    c_pr->require_subcommand(1);
    auto* c_pl = c_pr->add_subcommand("list", "list preset names");
    std::string show_name;
    auto* c_ps = c_pr->add_subcommand("show", "print a preset as model JSON");
    c_ps->add_option("name", show_name)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << one_line(e.what()) << '\n';
        return 2;
    }

    try {
        g.window = parse_window(window);
        if (c_cir->parsed()) {
            if (!gate.empty()) cir.gate_s = parse_gate(gate);
            if (!cir_output.empty()) cir.output = cir_output;
            std::cout << cmd_cir(g, cir).string() << '\n';
        } else if (c_ex->parsed()) {
            cmd_extract(g, ex);
            std::cout << (g.out / ex.output_name).string() << '\n';
        } else if (c_sy->parsed()) {
            const auto files = cmd_synth(g, sy);
            std::cout << files.size() / 3 << " realization(s) written to " << g.out.string() << '\n';
        } else if (c_de->parsed()) {
            std::cout << cmd_design(g, de).dump(2) << '\n';
        } else if (c_be->parsed()) {
            be.config = make_config(n_fft, n_cp, n_user, bits, bw);
            if (!ber_output.empty()) be.output = ber_output;
            const auto r = cmd_ber(g, be);
            for (const auto& p : r.curve.points)
                if (p.capped)
                    std::cerr << "warning: Eb/N0 " << format_double(p.eb_n0_db) << " dB hit the bit cap with "
                              << p.errors << " errors\n";
            std::cout << r.path.string() << '\n';
        } else if (c_pl->parsed()) {
            for (const auto& n : cmd_preset_list()) std::cout << n << '\n';
        } else if (c_ps->parsed()) {
            std::cout << cmd_preset_show(show_name).dump(2) << '\n';
        }
    } catch (const ParseError& e) {
        std::cerr << "error: parse: " << one_line(e.what()) << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << one_line(e.what()) << '\n';
        return 1;
    }
    return 0;
}
