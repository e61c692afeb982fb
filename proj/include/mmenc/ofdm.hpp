#pragma once

// OFDM design arithmetic and an uncoded BPSK/QPSK-OFDM bit-error-rate
// simulator with perfect-CSI one-tap zero-forcing equalization.

#include "mmenc/dsp.hpp"
#include "mmenc/extraction.hpp"
#include "mmenc/rng.hpp"

#include <cstdint>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mmenc {

struct OfdmConfig {
    std::size_t n_fft = 0;         ///< N
    std::size_t n_cp = 0;          ///< N_cp
    std::size_t n_user = 0;        ///< N_u, data/pilot subcarriers
    std::size_t n_guard_total = 0; ///< null subcarriers, split over both band edges
    int bits_per_symbol = 1;       ///< l, M = 2^l
    double bandwidth_hz = 0.0;     ///< B_w, T_s = 1 / B_w

    double symbol_period_s() const noexcept { return 1.0 / bandwidth_hz; }
    /// l * N_u / (N_cp + N)
    double kappa() const noexcept {
        return static_cast<double>(bits_per_symbol) * static_cast<double>(n_user) /
               static_cast<double>(n_cp + n_fft);
    }
};

/// Builds a config with n_guard_total = n_fft - n_user and validates it.
OfdmConfig make_config(std::size_t n_fft, std::size_t n_cp, std::size_t n_user, int bits_per_symbol,
                       double bandwidth_hz);

void validate(const OfdmConfig& cfg);

struct RateLatency {
    double data_rate_bps = 0.0;
    double latency_s = 0.0;
    double kappa = 0.0;
};

RateLatency rate_and_latency(const OfdmConfig& cfg);

/// nu * f_c / c
double doppler_hz(double speed_mps, double carrier_hz);

/// 4 pi A_e f_c^2 / c^2, linear.
double antenna_gain(double effective_aperture_m2, double carrier_hz);

inline double to_db(double linear) { return 10.0 * std::log10(linear); }

/// Eb/N0 + 10 log10(l N_u / (N_cp + N)).
double es_n0_from_eb_n0(double eb_n0_db, const OfdmConfig& cfg);

struct DesignEnvelope {
    double t_max_s = 0.0;
    double doppler_hz = 0.0;
    double speed_mps = 0.0;
    double carrier_hz = 60e9;
};

struct DesignLimits {
    double doppler_factor = 0.1;    ///< (N + N_cp) * df_D * T_s must stay below this
    double flat_fading_factor = 1.5; ///< N >= factor * B_w * t_max
    std::size_t max_block = 250'000; ///< N + N_cp must stay below this
};

struct DesignReport {
    // N_cp * T_s >= t_max
    double cp_margin_s = 0.0;
    bool cp_ok = false;
    // (N + N_cp) * df_D * T_s vs doppler_factor; margin = factor / product (inf when product is 0)
    double doppler_product = 0.0;
    double doppler_margin = 0.0;
    bool doppler_ok = false;
    // N / (B_w * t_max) vs flat_fading_factor (inf when t_max is 0). A soft constraint.
    double flat_fading_ratio = 0.0;
    bool flat_fading_ok = false;
    bool block_ok = false;

    bool all_ok() const noexcept { return cp_ok && doppler_ok && flat_fading_ok && block_ok; }
};

DesignReport check_design(const OfdmConfig& cfg, const DesignEnvelope& env, const DesignLimits& lim = {});

/// ceil((1 + margin) * t_last / T_s), t_last the delay of the last path.
std::size_t cp_from_channel(const MultipathProfile& profile, double symbol_period_s, double margin = 0.0);

/// Same rule from a channel length.
std::size_t cp_from_length(double t_max_s, double symbol_period_s, double margin = 0.0);

// ---------------------------------------------------------------------------
// Monte Carlo BER

struct StopRule {
    std::uint64_t min_bits = 1'000'000;
    std::uint64_t min_errors = 100;
    std::uint64_t max_bits = 100'000'000;
};

struct BerPoint {
    double eb_n0_db = 0.0;
    double ber = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    bool capped = false; ///< max_bits reached before min_errors
};

struct BerCurve {
    std::vector<BerPoint> points;
    OfdmConfig config;
    std::string channel_label;
    std::uint64_t seed = 0;
};

/// Use +infinity on the grid for a noiseless point.
inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

/// Draws one channel per OFDM block; the draw should have unit expected power.
using ChannelDraw = std::function<ImpulseResponse(Rng&)>;

/// Fixed channel. It is resampled to T_s and scaled to unit energy. Throws
/// if its support exceeds N_cp + 1 samples.
BerCurve simulate_ber(const OfdmConfig& cfg, const ImpulseResponse& channel, std::span<const double> eb_n0_db,
                      const StopRule& stop, std::uint64_t seed, std::string channel_label = {});

/// Fresh channel per block (e.g. a Rayleigh ensemble). Draws are used as
/// given, without normalization, so fading statistics are preserved.
BerCurve simulate_ber(const OfdmConfig& cfg, const ChannelDraw& draw, std::span<const double> eb_n0_db,
                      const StopRule& stop, std::uint64_t seed, std::string channel_label = {});

/// Q(sqrt(2 Eb/N0))
double bpsk_awgn_ber(double eb_n0_db);
/// 0.5 (1 - sqrt(g / (1 + g))), g = Eb/N0
double bpsk_rayleigh_ber(double eb_n0_db);

/// "start:step:stop" in dB, inclusive of stop when it lands on the grid.
std::vector<double> parse_grid(std::string_view spec);

} // namespace mmenc
