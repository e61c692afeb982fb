#pragma once

// Statistical parameter extraction from impulse responses: path detection,
// thresholding, RMS delay spread, path-loss regression and decay fitting.
// Distribution and arrival-process fits live in distributions.hpp and
// arrivals.hpp.

#include "mmenc/dsp.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace mmenc {

inline constexpr double kDefaultThresholdDb = 30.0;

struct Path {
    double delay_s = 0.0;
    double power = 0.0; ///< linear a_n^2

    bool operator==(const Path&) const = default;
};

/// Discrete multipath components, delays strictly increasing, every power
/// within threshold_db of the strongest.
struct MultipathProfile {
    std::vector<Path> paths;
    double threshold_db = kDefaultThresholdDb;

    std::size_t size() const noexcept { return paths.size(); }
    bool empty() const noexcept { return paths.empty(); }
    double total_power() const noexcept;
    double peak_power() const noexcept;
};

/// Throws Error unless delays are strictly increasing and powers positive
/// and within threshold_db of the peak.
void validate(const MultipathProfile& profile);

/// Strict local maxima of |h_k|^2 within threshold_db of the global peak.
/// A sample at either end of the record is compared with its single neighbour.
MultipathProfile detect_paths(const ImpulseResponse& cir, double threshold_db = kDefaultThresholdDb);

/// Drops paths more than threshold_db below the strongest one.
MultipathProfile apply_threshold(const MultipathProfile& profile, double threshold_db);

/// Power in samples within threshold_db of the peak over total power.
double captured_power_fraction(const ImpulseResponse& cir, double threshold_db = kDefaultThresholdDb);

/// sqrt(mean(t^2) - mean(t)^2) with power weights; seconds.
double rms_delay_spread(const MultipathProfile& profile);

// ---------------------------------------------------------------------------
// Path loss

struct PathLossSample {
    double distance_m = 0.0;
    double loss_db = 0.0;
};

/// loss(d) = pl_d0 + alpha * 10 log10(d / d0) + X_sigma
struct PathLossFit {
    double pl_d0 = 0.0;
    double alpha = 0.0;
    double sigma = 0.0;        ///< ML std of the residuals (divides by n)
    double alpha_stderr = 0.0; ///< OLS standard error of alpha (residual variance over n - 2)
    double d0 = 1.0;
    std::vector<double> residuals;
};

PathLossFit fit_path_loss(std::span<const PathLossSample> points, double d0_m = 1.0);

// ---------------------------------------------------------------------------
// Decay constant

struct DecayFit {
    double gamma_s = 0.0;
    double rmse_db = 0.0;
};

/// Least squares of ln(p_n / p_0) = -(t_n - t_0) / gamma through the origin.
DecayFit fit_decay_constant(const MultipathProfile& profile);

// ---------------------------------------------------------------------------
// Ensembles

struct ThresholdSweepRow {
    double threshold_db = 0.0;
    double mean_path_count = 0.0;
    double mean_rds_s = 0.0;
};

std::vector<ThresholdSweepRow> rds_threshold_sweep(std::span<const ImpulseResponse> cirs,
                                                   std::span<const double> thresholds_db);

/// Ensemble power delay profile: mean of |h_k|^2 across CIRs (shorter CIRs
/// are zero-padded), accumulated into bins of bin_samples samples. Each
/// bin is reported at its centre time with its mean per-sample power;
/// empty bins are omitted.
MultipathProfile ensemble_pdp(std::span<const ImpulseResponse> cirs, std::size_t bin_samples);

// ---------------------------------------------------------------------------
// Measurement geometry

struct Point3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

struct ReceiverGrid {
    Point3 tx;
    std::vector<Point3> rx;
};

/// Transmitter position and receiver locations (metres) for the three
/// cabinet scenarios: "sc1", "sc2", "sc3".
ReceiverGrid receiver_grid(std::string_view scenario);

/// 3-D Euclidean Tx-Rx distances, metres, in receiver-grid order.
std::vector<double> tx_rx_distances(const ReceiverGrid& grid);

} // namespace mmenc
