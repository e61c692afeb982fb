#include "mmenc/ofdm.hpp"

#include "mmenc/error.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <numbers>
#include <string>

namespace mmenc {

OfdmConfig make_config(std::size_t n_fft, std::size_t n_cp, std::size_t n_user, int bits_per_symbol,
                       double bandwidth_hz) {
    if (n_user > n_fft) throw Error("ofdm config: N_u exceeds N");
    OfdmConfig cfg{n_fft, n_cp, n_user, n_fft - n_user, bits_per_symbol, bandwidth_hz};
    validate(cfg);
    return cfg;
}

void validate(const OfdmConfig& cfg) {
    if (cfg.n_fft == 0) throw Error("ofdm config: N must be positive");
    if (cfg.n_user == 0) throw Error("ofdm config: N_u must be positive");
    if (cfg.n_user + cfg.n_guard_total != cfg.n_fft) throw Error("ofdm config: N_u + guards must equal N");
    if (cfg.bits_per_symbol < 1) throw Error("ofdm config: bits per symbol must be >= 1");
    if (!(cfg.bandwidth_hz > 0.0) || !std::isfinite(cfg.bandwidth_hz))
        throw Error("ofdm config: bandwidth must be positive");
}

RateLatency rate_and_latency(const OfdmConfig& cfg) {
    validate(cfg);
    const double block = static_cast<double>(cfg.n_cp + cfg.n_fft);
    RateLatency r;
    r.kappa = cfg.kappa();
    r.data_rate_bps = static_cast<double>(cfg.bits_per_symbol) * static_cast<double>(cfg.n_user) *
                      cfg.bandwidth_hz / block;
    r.latency_s = block / cfg.bandwidth_hz;
    return r;
}

double doppler_hz(double speed_mps, double carrier_hz) {
    if (!(speed_mps >= 0.0)) throw Error("doppler: speed must be non-negative");
    return speed_mps * carrier_hz / kSpeedOfLight;
}

double antenna_gain(double effective_aperture_m2, double carrier_hz) {
    if (!(effective_aperture_m2 > 0.0) || !(carrier_hz > 0.0))
        throw Error("antenna_gain: aperture and carrier must be positive");
    return 4.0 * std::numbers::pi * effective_aperture_m2 * carrier_hz * carrier_hz /
           (kSpeedOfLight * kSpeedOfLight);
}

double es_n0_from_eb_n0(double eb_n0_db, const OfdmConfig& cfg) {
    validate(cfg);
    return eb_n0_db + 10.0 * std::log10(cfg.kappa());
}

DesignReport check_design(const OfdmConfig& cfg, const DesignEnvelope& env, const DesignLimits& lim) {
    validate(cfg);
    const double ts = cfg.symbol_period_s();
    const double n = static_cast<double>(cfg.n_fft);
    const double block = static_cast<double>(cfg.n_fft + cfg.n_cp);
    DesignReport r;

    r.cp_margin_s = static_cast<double>(cfg.n_cp) * ts - env.t_max_s;
    // equality counts as met; the slack absorbs rounding of N_cp * T_s
    r.cp_ok = r.cp_margin_s >= -1e-9 * std::max(env.t_max_s, ts);

    r.doppler_product = block * env.doppler_hz * ts;
    r.doppler_margin = r.doppler_product > 0.0 ? lim.doppler_factor / r.doppler_product
                                               : std::numeric_limits<double>::infinity();
    r.doppler_ok = r.doppler_product < lim.doppler_factor;

    const double spread = cfg.bandwidth_hz * env.t_max_s;
    r.flat_fading_ratio = spread > 0.0 ? n / spread : std::numeric_limits<double>::infinity();
    r.flat_fading_ok = r.flat_fading_ratio >= lim.flat_fading_factor;

    r.block_ok = cfg.n_fft + cfg.n_cp < lim.max_block;
    return r;
}

std::size_t cp_from_length(double t_max_s, double symbol_period_s, double margin) {
    if (!(symbol_period_s > 0.0)) throw Error("cp_from_channel: symbol period must be positive");
    if (!(t_max_s >= 0.0) || !(margin >= 0.0)) throw Error("cp_from_channel: negative length or margin");
    const double x = (1.0 + margin) * t_max_s / symbol_period_s;
    // tolerate representation error when x is an integer in exact arithmetic
    return static_cast<std::size_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
}

std::size_t cp_from_channel(const MultipathProfile& profile, double symbol_period_s, double margin) {
    if (profile.empty()) throw Error("cp_from_channel: empty profile");
    return cp_from_length(profile.paths.back().delay_s, symbol_period_s, margin);
}

double bpsk_awgn_ber(double eb_n0_db) {
    const double g = std::pow(10.0, eb_n0_db / 10.0);
    return 0.5 * std::erfc(std::sqrt(g));
}

double bpsk_rayleigh_ber(double eb_n0_db) {
    const double g = std::pow(10.0, eb_n0_db / 10.0);
    return 0.5 * (1.0 - std::sqrt(g / (1.0 + g)));
}

std::vector<double> parse_grid(std::string_view spec) {
    auto num = [&](std::string_view s) {
        double v = 0.0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || s.empty())
            throw Error("bad grid spec '" + std::string(spec) + "' (expected start:step:stop)");
        return v;
    };
    const auto a = spec.find(':');
    if (a == std::string_view::npos) return {num(spec)};
    const auto b = spec.find(':', a + 1);
    if (b == std::string_view::npos) throw Error("bad grid spec '" + std::string(spec) + "' (expected start:step:stop)");
    const double start = num(spec.substr(0, a)), step = num(spec.substr(a + 1, b - a - 1)),
                 stop = num(spec.substr(b + 1));
    if (!(step > 0.0) || stop < start) throw Error("bad grid spec '" + std::string(spec) + "'");
    std::vector<double> g;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) g.push_back(start + static_cast<double>(i) * step);
    return g;
}

} // namespace mmenc
