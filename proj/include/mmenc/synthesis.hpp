#pragma once

// Stochastic channel generation: single-decay metal-enclosure model with
// mixed-Poisson arrivals, Saleh-Valenzuela cluster model, and a flat-PDP
// Rayleigh tapped delay line. All generators take the RNG explicitly.

#include "mmenc/dsp.hpp"
#include "mmenc/extraction.hpp"
#include "mmenc/rng.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mmenc {

/// Parameters of one metal-enclosure scenario. Rates in 1/ns, times in ns.
struct ChannelModel {
    double pl_d0 = 0.0;    ///< dB at d0 = 1 m
    double alpha = 0.0;    ///< path-loss exponent
    double sigma_pl = 0.0; ///< shadowing std, dB
    double gamma_mean_ns = 0.0;
    double gamma_std_ns = 0.0;
    double lambda = 0.0;   ///< single-Poisson rate, descriptive
    double lambda1 = 0.0;  ///< mixture rates used for generation
    double lambda2 = 0.0;
    double b = 0.0;        ///< probability of a lambda1 gap
    double mean_rds_ns = 0.0; ///< descriptive
    double threshold_db = kDefaultThresholdDb; ///< generation horizon below the first path
    std::string label;
};

/// Saleh-Valenzuela parameters. Rates in 1/ns, decays in ns, fading stds in dB.
struct SvModel {
    double cluster_rate = 0.0;
    double ray_rate = 0.0;
    double cluster_decay = 0.0;
    double ray_decay = 0.0;
    double sigma_cluster = 0.0;
    double sigma_ray = 0.0;
    std::string label;
};

using AnyModel = std::variant<ChannelModel, SvModel>;

void validate(const ChannelModel& m);
void validate(const SvModel& m);

/// A drawn channel.
///
/// profile holds the path delays with their expected (pre-fading) powers,
/// normalized to unit sum. cir holds the Rayleigh-faded complex gains
/// binned onto the sample grid; its expected total power is 1. Neither
/// includes the large-scale gain.
struct Realization {
    MultipathProfile profile;
    ImpulseResponse cir;
    double large_scale_gain_db = 0.0;
    std::uint64_t seed = 0;
    std::string model_label;
};

std::vector<std::string> preset_names();
AnyModel preset(std::string_view name);

/// Arrival times in ns: t0 = 0, gaps from the two-component exponential
/// mixture, last arrival <= horizon_ns.
std::vector<double> draw_arrivals(const ChannelModel& model, double horizon_ns, Rng& rng);

/// gamma * ln(10^(threshold_db / 10)), ns.
double generation_horizon_ns(double gamma_ns, double threshold_db);

struct SynthesisOptions {
    double sample_period_s = 0.2e-9;
    double distance_m = 1.0;
    std::uint64_t seed = 0; ///< recorded on the realization only
};

Realization synthesize_cir(const ChannelModel& model, const SynthesisOptions& opt, Rng& rng);

/// One cluster is forced at t = 0 and every cluster starts with a ray at its
/// own arrival time.
Realization synthesize_sv_cir(const SvModel& model, double sample_period_s, double horizon_ns, Rng& rng,
                              std::uint64_t seed = 0);

/// n_taps i.i.d. CN(0, 1/n_taps) taps on consecutive samples.
Realization rayleigh_tdl(std::size_t n_taps, double sample_period_s, Rng& rng, std::uint64_t seed = 0);

/// Scales the profile to unit total power and the CIR to unit energy.
Realization normalize_unit_power(const Realization& r);

} // namespace mmenc
