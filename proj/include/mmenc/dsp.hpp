#pragma once

// Frequency-domain sounding math: sweep geometry, windowing, CFR <-> CIR
// transforms, reference-based inverse filtering, time gating and
// normalization.

#include "mmenc/fft.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mmenc {

inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Uniform frequency grid of a swept measurement.
///
/// Sample i sits at f_min + i * spacing, with spacing = bandwidth / n_points,
/// so the grid stops one spacing short of f_max. The three derived
/// quantities satisfy spacing * max_excess_delay == 1 and
/// bandwidth * resolution == 1.
struct SweepGeometry {
    double f_min_hz = 0.0;
    double f_max_hz = 0.0;
    std::size_t n_points = 0;

    double bandwidth_hz() const noexcept { return f_max_hz - f_min_hz; }
    double spacing_hz() const noexcept { return bandwidth_hz() / static_cast<double>(n_points); }
    double resolution_s() const noexcept { return 1.0 / bandwidth_hz(); }
    double max_excess_delay_s() const noexcept { return 1.0 / spacing_hz(); }
    double frequency_hz(std::size_t i) const noexcept {
        return f_min_hz + static_cast<double>(i) * spacing_hz();
    }

    bool operator==(const SweepGeometry&) const = default;
};

/// Throws Error on non-positive bandwidth or fewer than two points.
SweepGeometry sweep_geometry(double f_min_hz, double f_max_hz, std::size_t n_points);

/// Geometry equality up to a relative tolerance on the band edges.
bool same_geometry(const SweepGeometry& a, const SweepGeometry& b, double rel_tol = 1e-9);

/// Complex frequency response samples (S21 / CFR) on a uniform grid.
struct FrequencySweep {
    SweepGeometry geometry;
    CVec samples;
    std::string label;
};

/// Uniformly sampled complex impulse response.
struct ImpulseResponse {
    double sample_period_s = 0.0;
    double t0_s = 0.0;
    CVec samples;

    double time_s(std::size_t k) const noexcept {
        return t0_s + static_cast<double>(k) * sample_period_s;
    }
    double total_power() const noexcept;
};

enum class Window { hann, none };

Window parse_window(std::string_view name);
std::string_view to_string(Window w) noexcept;

std::vector<double> window_coefficients(Window kind, std::size_t n);

FrequencySweep apply_window(const FrequencySweep& sweep, Window kind);

/// Windowed inverse DFT with 1/N scaling; returns exactly n_points samples,
/// spaced by the sweep resolution, starting at t0 = 0.
ImpulseResponse cfr_to_cir(const FrequencySweep& sweep, Window kind);

/// Forward DFT of a CIR onto a grid starting at f_min_hz. Inverse of
/// cfr_to_cir(..., Window::none).
FrequencySweep cir_to_cfr(const ImpulseResponse& cir, double f_min_hz, std::string label = {});

inline constexpr double kDefaultInverseFilterFloor = 1e-6;

/// H_i = R_i / R_fl,i. Reference bins weaker than floor * max|R_fl| are
/// lifted to that magnitude with their phase kept (zero bins get phase 0).
FrequencySweep inverse_filter(const FrequencySweep& measured, const FrequencySweep& reference,
                              double floor = kDefaultInverseFilterFloor);

/// Zeros samples whose time lies outside [t_start, t_stop).
ImpulseResponse time_gate(const ImpulseResponse& cir, double t_start_s, double t_stop_s);

struct PeakNormalized {
    ImpulseResponse cir;
    double scale_db = 0.0; ///< gain applied; subtract it to recover absolute power
};

PeakNormalized normalize_peak(const ImpulseResponse& cir);

/// Re-inserts the free-space delay d/c and amplitude c/(4 pi f d) of the
/// reference measurement that inverse filtering divided out.
FrequencySweep reference_correction(const FrequencySweep& h, double reference_distance_m);

/// Sample-wise mean of sweeps sharing one geometry.
FrequencySweep average_sweeps(std::span<const FrequencySweep> sweeps);

inline constexpr double kReferenceGateStop = 50e-9;
inline constexpr double kReferenceDistance = 0.25;

/// Free-space reference prepared for inverse filtering: transformed to time
/// domain without window, gated to [0, gate_stop) and transformed back.
FrequencySweep gated_reference(const FrequencySweep& reference, double gate_stop_s = kReferenceGateStop);

struct SoundingOptions {
    Window window = Window::hann;
    double floor = kDefaultInverseFilterFloor;
    double reference_gate_stop_s = kReferenceGateStop;
    std::optional<double> reference_distance_m; ///< apply reference_correction when set
    std::optional<std::pair<double, double>> gate; ///< optional gate on the final CIR
};

/// Full sounding pipeline: optional reference gating and inverse filtering,
/// window on the resulting CFR, inverse transform, optional output gate.
ImpulseResponse sounding_to_cir(const FrequencySweep& measured, const FrequencySweep* reference,
                                const SoundingOptions& opt);

/// Nearest-bin coherent resampling onto a grid of period sample_period_s,
/// starting at the CIR's t0.
ImpulseResponse resample(const ImpulseResponse& cir, double sample_period_s);

/// Index one past the last non-zero sample (0 for an all-zero CIR).
std::size_t support_length(const ImpulseResponse& cir) noexcept;

} // namespace mmenc
