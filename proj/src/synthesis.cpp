#include "mmenc/synthesis.hpp"

#include "mmenc/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mmenc {

void validate(const ChannelModel& m) {
    if (!(m.gamma_mean_ns > 0.0)) throw Error("channel model: gamma mean must be positive");
    if (!(m.gamma_std_ns >= 0.0)) throw Error("channel model: gamma std must be non-negative");
    if (!(m.lambda1 > 0.0) || !(m.lambda2 > 0.0)) throw Error("channel model: arrival rates must be positive");
    if (!(m.b >= 0.0 && m.b <= 1.0)) throw Error("channel model: mixing probability outside [0, 1]");
    if (!(m.sigma_pl >= 0.0)) throw Error("channel model: sigma_pl must be non-negative");
    if (!(m.threshold_db > 0.0)) throw Error("channel model: threshold_db must be positive");
    if (!std::isfinite(m.pl_d0) || !std::isfinite(m.alpha)) throw Error("channel model: non-finite path loss");
}

void validate(const SvModel& m) {
    if (!(m.cluster_rate > 0.0) || !(m.ray_rate > 0.0)) throw Error("sv model: rates must be positive");
    if (!(m.cluster_decay > 0.0) || !(m.ray_decay > 0.0)) throw Error("sv model: decays must be positive");
    if (!(m.sigma_cluster >= 0.0) || !(m.sigma_ray >= 0.0)) throw Error("sv model: fading stds must be non-negative");
}

namespace {

double positive_gap(std::exponential_distribution<double>& d, Rng& rng) {
    double g = 0.0;
    while (!(g > 0.0)) g = d(rng);
    return g;
}

cplx rayleigh_gain(double mean_power, Rng& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    const double s = std::sqrt(mean_power / 2.0);
    const double re = n01(rng);
    const double im = n01(rng);
    return {s * re, s * im};
}

ImpulseResponse bin_paths(const std::vector<double>& t_ns, const CVec& gains, double ts, double horizon_ns) {
    ImpulseResponse cir;
    cir.sample_period_s = ts;
    cir.t0_s = 0.0;
    const auto len = static_cast<std::size_t>(std::llround(horizon_ns * 1e-9 / ts)) + 1;
    cir.samples.assign(len, cplx{});
    for (std::size_t i = 0; i < t_ns.size(); ++i) {
        const auto k = static_cast<std::size_t>(std::llround(t_ns[i] * 1e-9 / ts));
        if (k >= cir.samples.size()) cir.samples.resize(k + 1);
        cir.samples[k] += gains[i];
    }
    return cir;
}

} // namespace

double generation_horizon_ns(double gamma_ns, double threshold_db) {
    return gamma_ns * threshold_db / 10.0 * std::log(10.0);
}

std::vector<double> draw_arrivals(const ChannelModel& model, double horizon_ns, Rng& rng) {
    if (!(horizon_ns > 0.0)) throw Error("draw_arrivals: horizon must be positive");
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::exponential_distribution<double> slow(model.lambda1), fast(model.lambda2);
    std::vector<double> t{0.0};
    for (;;) {
        const bool use_slow = u01(rng) < model.b;
        const double next = t.back() + (use_slow ? positive_gap(slow, rng) : positive_gap(fast, rng));
        if (next > horizon_ns) break;
        t.push_back(next);
    }
    return t;
}

Realization synthesize_cir(const ChannelModel& model, const SynthesisOptions& opt, Rng& rng) {
    validate(model);
    if (!(opt.distance_m > 0.0)) throw Error("synthesize_cir: distance must be positive");
    if (!(opt.sample_period_s > 0.0)) throw Error("synthesize_cir: sample period must be positive");

    double gamma = 0.0;
    if (model.gamma_std_ns > 0.0) {
        std::normal_distribution<double> g(model.gamma_mean_ns, model.gamma_std_ns);
        while (!(gamma > 0.0)) gamma = g(rng);
    } else {
        gamma = model.gamma_mean_ns;
    }
    const double horizon = generation_horizon_ns(gamma, model.threshold_db);
    const auto t = draw_arrivals(model, horizon, rng);

    std::vector<double> pbar(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) pbar[i] = std::exp(-t[i] / gamma);
    const double sum = std::accumulate(pbar.begin(), pbar.end(), 0.0);
    for (auto& p : pbar) p /= sum;

    CVec gains(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) gains[i] = rayleigh_gain(pbar[i], rng);

    std::normal_distribution<double> shadow(0.0, 1.0);
    const double x_sigma = model.sigma_pl * shadow(rng);

    Realization r;
    r.profile.threshold_db = model.threshold_db;
    r.profile.paths.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) r.profile.paths.push_back({t[i] * 1e-9, pbar[i]});
    r.cir = bin_paths(t, gains, opt.sample_period_s, horizon);
    r.large_scale_gain_db = -(model.pl_d0 + model.alpha * 10.0 * std::log10(opt.distance_m) + x_sigma);
    r.seed = opt.seed;
    r.model_label = model.label;
    return r;
}

Realization synthesize_sv_cir(const SvModel& model, double sample_period_s, double horizon_ns, Rng& rng,
                              std::uint64_t seed) {
    validate(model);
    if (!(horizon_ns > 0.0)) throw Error("synthesize_sv_cir: horizon must be positive");
    if (!(sample_period_s > 0.0)) throw Error("synthesize_sv_cir: sample period must be positive");

    std::exponential_distribution<double> cluster_gap(model.cluster_rate), ray_gap(model.ray_rate);
    std::normal_distribution<double> n01(0.0, 1.0);

    struct Ray {
        double t;
        double p;
    };
    std::vector<Ray> rays;
    for (double tc = 0.0; tc <= horizon_ns; tc += positive_gap(cluster_gap, rng)) {
        const double cluster_db = model.sigma_cluster * n01(rng);
        for (double tr = 0.0; tc + tr <= horizon_ns; tr += positive_gap(ray_gap, rng)) {
            const double ray_db = model.sigma_ray * n01(rng);
            const double p = std::exp(-tc / model.cluster_decay) * std::exp(-tr / model.ray_decay) *
                             std::pow(10.0, (cluster_db + ray_db) / 10.0);
            rays.push_back({tc + tr, p});
        }
    }
    std::sort(rays.begin(), rays.end(), [](const Ray& a, const Ray& b) { return a.t < b.t; });
    // coincident arrivals (measure zero) merge into one path
    std::vector<Ray> merged;
    for (const auto& r : rays) {
        if (!merged.empty() && r.t <= merged.back().t) merged.back().p += r.p;
        else merged.push_back(r);
    }
    double sum = 0.0;
    for (const auto& r : merged) sum += r.p;

    Realization out;
    std::vector<double> t;
    CVec gains;
    double pmax = 0.0, pmin = INFINITY;
    for (const auto& r : merged) {
        const double p = r.p / sum;
        if (!(p > 0.0)) continue; // underflowed far tail
        out.profile.paths.push_back({r.t * 1e-9, p});
        t.push_back(r.t);
        gains.push_back(rayleigh_gain(p, rng));
        pmax = std::max(pmax, p);
        pmin = std::min(pmin, p);
    }
    // the profile keeps every ray, so its threshold is the span it covers
    out.profile.threshold_db = std::max(kDefaultThresholdDb, std::ceil(10.0 * std::log10(pmax / pmin)) + 1.0);
    out.cir = bin_paths(t, gains, sample_period_s, horizon_ns);
    out.seed = seed;
    out.model_label = model.label;
    return out;
}

Realization rayleigh_tdl(std::size_t n_taps, double sample_period_s, Rng& rng, std::uint64_t seed) {
    if (n_taps == 0) throw Error("rayleigh_tdl: need at least one tap");
    if (!(sample_period_s > 0.0)) throw Error("rayleigh_tdl: sample period must be positive");
    const double p = 1.0 / static_cast<double>(n_taps);
    Realization r;
    r.cir.sample_period_s = sample_period_s;
    r.cir.samples.resize(n_taps);
    r.profile.threshold_db = kDefaultThresholdDb;
    for (std::size_t k = 0; k < n_taps; ++k) {
        r.cir.samples[k] = rayleigh_gain(p, rng);
        r.profile.paths.push_back({static_cast<double>(k) * sample_period_s, p});
    }
    r.seed = seed;
    r.model_label = "rayleigh:" + std::to_string(n_taps);
    return r;
}

Realization normalize_unit_power(const Realization& r) {
    const double pp = r.profile.total_power();
    const double cp = r.cir.total_power();
    if (r.profile.empty() || !(pp > 0.0) || !(cp > 0.0)) throw Error("normalize_unit_power: zero-power realization");
    Realization out = r;
    for (auto& p : out.profile.paths) p.power /= pp;
    const double g = 1.0 / std::sqrt(cp);
    for (auto& s : out.cir.samples) s *= g;
    return out;
}

} // namespace mmenc
