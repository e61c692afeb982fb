#include "mmenc/arrivals.hpp"

#include "mmenc/error.hpp"
#include "mmenc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mmenc {

std::vector<double> inter_arrivals_ns(const MultipathProfile& profile) {
    std::vector<double> g;
    if (profile.size() < 2) return g;
    g.reserve(profile.size() - 1);
    for (std::size_t i = 1; i < profile.size(); ++i)
        g.push_back((profile.paths[i].delay_s - profile.paths[i - 1].delay_s) * 1e9);
    return g;
}

double exponential_log_likelihood(std::span<const double> gaps, double lambda) {
    const double sum = std::accumulate(gaps.begin(), gaps.end(), 0.0);
    return static_cast<double>(gaps.size()) * std::log(lambda) - lambda * sum;
}

namespace {

// log(b l1 e^{-l1 x} + (1-b) l2 e^{-l2 x}) without underflow
inline double log_mix(double x, double log_w1, double l1, double log_w2, double l2) {
    const double a = log_w1 - l1 * x;
    const double c = log_w2 - l2 * x;
    const double m = std::max(a, c);
    if (m == -INFINITY) return -INFINITY;
    return m + std::log(std::exp(a - m) + std::exp(c - m));
}

struct EmState {
    double l1, l2, b;
    double ll = -INFINITY;
    int iterations = 0;
    bool converged = false;
};

EmState run_em(std::span<const double> x, EmState s, const EmOptions& opt) {
    const double n = static_cast<double>(x.size());
    double prev = -INFINITY;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        const double lw1 = s.b > 0 ? std::log(s.b * s.l1) : -INFINITY;
        const double lw2 = s.b < 1 ? std::log((1.0 - s.b) * s.l2) : -INFINITY;
        double r_sum = 0.0, rx_sum = 0.0, q_sum = 0.0, qx_sum = 0.0, ll = 0.0;
        for (double v : x) {
            const double lm = log_mix(v, lw1, s.l1, lw2, s.l2);
            ll += lm;
            const double r = std::exp(lw1 - s.l1 * v - lm);
            r_sum += r;
            rx_sum += r * v;
            q_sum += 1.0 - r;
            qx_sum += (1.0 - r) * v;
        }
        // ll belongs to the parameters entering this iteration
        s.ll = ll;
        s.iterations = it;
        if (it > 1 && (ll - prev) / n < opt.tolerance) {
            s.converged = true;
            return s;
        }
        prev = ll;
        s.b = r_sum / n;
        if (rx_sum > 0.0 && r_sum > 0.0) s.l1 = r_sum / rx_sum;
        if (qx_sum > 0.0 && q_sum > 0.0) s.l2 = q_sum / qx_sum;
    }
    s.ll = mixture_log_likelihood(x, s.l1, s.l2, s.b);
    return s;
}

} // namespace

double mixture_log_likelihood(std::span<const double> gaps, double l1, double l2, double b) {
    const double lw1 = b > 0 ? std::log(b * l1) : -INFINITY;
    const double lw2 = b < 1 ? std::log((1.0 - b) * l2) : -INFINITY;
    double ll = 0.0;
    for (double v : gaps) ll += log_mix(v, lw1, l1, lw2, l2);
    return ll;
}

ArrivalFit fit_interarrivals(std::span<const double> gaps, const EmOptions& opt) {
    if (gaps.size() < 2) throw Error("fit_arrivals: need at least 2 inter-arrival times");
    for (double g : gaps)
        if (!(g > 0.0) || !std::isfinite(g)) throw Error("fit_arrivals: inter-arrival times must be positive");

    ArrivalFit fit;
    fit.n_gaps = gaps.size();
    const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
    fit.lambda = 1.0 / mean;
    fit.single_log_likelihood = exponential_log_likelihood(gaps, fit.lambda);

    // median split of the (log) gaps: short half seeds the fast component
    std::vector<double> sorted(gaps.begin(), gaps.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t half = sorted.size() / 2;
    const double short_mean = std::accumulate(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(half), 0.0) /
                              static_cast<double>(half);
    const double long_mean = std::accumulate(sorted.begin() + static_cast<std::ptrdiff_t>(half), sorted.end(), 0.0) /
                             static_cast<double>(sorted.size() - half);

    EmState best = run_em(gaps, {1.0 / long_mean, 1.0 / short_mean, 0.5}, opt);

    Rng rng = make_rng(opt.seed, {kStreamEm});
    std::uniform_real_distribution<double> log_factor(-std::log(10.0), std::log(10.0));
    std::uniform_real_distribution<double> weight(0.005, 0.5);
    for (int r = 0; r < opt.random_restarts; ++r) {
        double a = fit.lambda * std::exp(log_factor(rng));
        double c = fit.lambda * std::exp(log_factor(rng));
        if (a > c) std::swap(a, c);
        const double w = weight(rng);
        const auto s = run_em(gaps, {a, c, w}, opt);
        if (s.ll > best.ll) best = s;
    }

    // the single-Poisson model is the b = 0 edge of the mixture
    if (best.ll < fit.single_log_likelihood) best = {fit.lambda, fit.lambda, 0.0, fit.single_log_likelihood, 0, true};

    if (best.l1 > best.l2) {
        std::swap(best.l1, best.l2);
        best.b = 1.0 - best.b;
    }
    fit.lambda1 = best.l1;
    fit.lambda2 = best.l2;
    fit.b = std::clamp(best.b, 0.0, 1.0);
    fit.mixture_log_likelihood = best.ll;
    fit.iterations = best.iterations;
    fit.converged = best.converged;
    return fit;
}

ArrivalFit fit_arrivals(const MultipathProfile& profile, const EmOptions& opt) {
    if (profile.size() < 3) throw Error("fit_arrivals: need at least 3 paths");
    const auto gaps = inter_arrivals_ns(profile);
    return fit_interarrivals(gaps, opt);
}

} // namespace mmenc
