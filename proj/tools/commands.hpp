#pragma once

// Subcommand implementations behind the mmenc executable. Each command is a
// pure function of its arguments: it reads its inputs, writes its outputs
// atomically under the output directory and returns what it wrote.

#include "mmenc/dsp.hpp"
#include "mmenc/ofdm.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mmenc::cli {

namespace fs = std::filesystem;

struct GlobalOptions {
    std::uint64_t seed = 0;
    fs::path out = ".";
    double threshold_db = kDefaultThresholdDb;
    Window window = Window::hann;
};

struct CirArgs {
    std::vector<fs::path> sweeps; ///< averaged when more than one
    std::optional<fs::path> reference;
    std::optional<std::pair<double, double>> gate_s;
    std::optional<double> reference_distance_m;
    double floor = kDefaultInverseFilterFloor;
    std::optional<fs::path> output; ///< defaults to <out>/<stem>_cir.csv
};

fs::path cmd_cir(const GlobalOptions& g, const CirArgs& a);

struct ExtractArgs {
    std::vector<fs::path> inputs; ///< CIR or profile CSVs, told apart by header
    bool path_loss = false;       ///< needs a distance per input
    std::optional<std::string> grid; ///< sc1|sc2|sc3: distances in receiver-grid order
    double d0_m = 1.0;
    std::vector<double> sweep_thresholds_db{10, 15, 20, 25, 30, 35, 40};
    std::string output_name = "report.json";
};

nlohmann::ordered_json cmd_extract(const GlobalOptions& g, const ExtractArgs& a);

struct SynthArgs {
    std::string model;   ///< preset name or model JSON path
    std::size_t count = 1;
    double distance_m = 1.0;
    std::optional<std::string> grid; ///< one realization per receiver-grid distance
    double sample_period_s = 0.2e-9;
    std::optional<double> horizon_db; ///< overrides the model's generation threshold
};

/// Returns the files written.
std::vector<fs::path> cmd_synth(const GlobalOptions& g, const SynthArgs& a);

struct DesignArgs {
    double bandwidth_hz = 5e9;
    std::size_t n_fft = 8192;
    std::size_t n_user = 6720;
    int bits_per_symbol = 1;
    std::optional<std::size_t> n_cp;
    std::optional<double> t_max_s;
    std::optional<fs::path> channel; ///< CIR or profile CSV
    double cp_margin = 0.0;
    double speed_mps = 0.0;
    double carrier_hz = 60e9;
    DesignLimits limits;
    std::string output_name = "design.json";
};

nlohmann::ordered_json cmd_design(const GlobalOptions& g, const DesignArgs& a);

struct BerArgs {
    std::optional<fs::path> design; ///< JSON written by cmd_design; overrides the fields below
    OfdmConfig config = make_config(8192, 5000, 6720, 1, 5e9);
    std::string channel = "rayleigh:1"; ///< rayleigh:L | preset name | CIR CSV path
    double horizon_db = 40.0;           ///< generation horizon for preset channels
    std::string grid = "0:2:20";
    StopRule stop;
    bool theory = false; ///< append closed-form AWGN and flat-Rayleigh columns
    std::optional<fs::path> output;
};

struct BerResult {
    fs::path path;
    BerCurve curve;
};

BerResult cmd_ber(const GlobalOptions& g, const BerArgs& a);

std::vector<std::string> cmd_preset_list();
nlohmann::ordered_json cmd_preset_show(const std::string& name);

/// Serializes a double for JSON; non-finite values become null.
nlohmann::ordered_json number(double v);

} // namespace mmenc::cli
