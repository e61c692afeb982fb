#include "mmenc/distributions.hpp"

#include "mmenc/error.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace mmenc {

Family parse_family(std::string_view name) {
    if (name == "gaussian") return Family::gaussian;
    if (name == "gamma") return Family::gamma;
    if (name == "weibull") return Family::weibull;
    throw Error("unknown distribution family '" + std::string(name) + "'");
}

std::string_view to_string(Family f) noexcept {
    switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::gamma: return "gamma";
    case Family::weibull: return "weibull";
    }
    return "?";
}

double DistributionFit::mean() const {
    switch (family) {
    case Family::gaussian: return first;
    case Family::gamma: return first * second;
    case Family::weibull: return first * std::tgamma(1.0 + 1.0 / second);
    }
    return 0.0;
}

namespace {

struct Moments {
    double n = 0, mean = 0, var = 0, mean_log = 0;
};

Moments moments(std::span<const double> x, bool need_log) {
    Moments m;
    m.n = static_cast<double>(x.size());
    for (double v : x) m.mean += v;
    m.mean /= m.n;
    for (double v : x) m.var += (v - m.mean) * (v - m.mean);
    m.var /= m.n;
    if (need_log) {
        for (double v : x) m.mean_log += std::log(v);
        m.mean_log /= m.n;
    }
    return m;
}

// Root of a decreasing function g on [lo, hi], with bracket expansion.
template <class G>
double solve_decreasing(G g, double lo, double hi) {
    for (int i = 0; i < 200 && g(lo) < 0; ++i) lo /= 4;
    for (int i = 0; i < 200 && g(hi) > 0; ++i) hi *= 4;
    if (g(lo) < 0 || g(hi) > 0) throw Error("fit_distribution: shape parameter out of range");
    boost::uintmax_t iters = 500;
    const auto r = boost::math::tools::toms748_solve(
        g, lo, hi, boost::math::tools::eps_tolerance<double>(40), iters);
    return 0.5 * (r.first + r.second);
}

DistributionFit fit_gamma(std::span<const double> x) {
    const auto m = moments(x, true);
    // profile score in the shape: ln a - psi(a) = ln mean - mean(ln x)
    const double s = std::log(m.mean) - m.mean_log;
    if (!(s > 0.0)) throw Error("fit_distribution: zero variance");
    auto g = [s](double a) { return std::log(a) - boost::math::digamma(a) - s; };
    const double guess = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    const double a = solve_decreasing(g, guess / 2, guess * 2);
    DistributionFit f{Family::gamma, a, m.mean / a, 0.0};
    f.log_likelihood = log_likelihood(f, x);
    return f;
}

DistributionFit fit_weibull(std::span<const double> x) {
    const double xmax = *std::max_element(x.begin(), x.end());
    std::vector<double> u(x.size()), lu(x.size());
    double mean_lu = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        u[i] = x[i] / xmax;
        lu[i] = std::log(u[i]);
        mean_lu += lu[i];
    }
    mean_lu /= static_cast<double>(x.size());
    if (std::all_of(u.begin(), u.end(), [&](double v) { return v == u.front(); }))
        throw Error("fit_distribution: zero variance");
    // profile score in the shape k (scale-free form on u = x / max x):
    // 1/k + mean(ln u) - sum(u^k ln u) / sum(u^k) = 0, decreasing in k
    auto g = [&](double k) {
        double a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double w = std::exp(k * lu[i]);
            a += w;
            b += w * lu[i];
        }
        return 1.0 / k + mean_lu - b / a;
    };
    const auto m = moments(x, false);
    const double guess = std::max(0.1, 1.2 * m.mean / std::sqrt(m.var));
    const double k = solve_decreasing(g, guess / 2, guess * 2);
    double a = 0.0;
    for (double v : lu) a += std::exp(k * v);
    const double zeta = xmax * std::pow(a / static_cast<double>(u.size()), 1.0 / k);
    DistributionFit f{Family::weibull, zeta, k, 0.0};
    f.log_likelihood = log_likelihood(f, x);
    return f;
}

} // namespace

DistributionFit fit_distribution(std::span<const double> samples, Family family) {
    if (samples.size() < 2) throw Error("fit_distribution: need at least 2 samples");
    for (double v : samples)
        if (!std::isfinite(v)) throw Error("fit_distribution: non-finite sample");
    if (family != Family::gaussian)
        for (double v : samples)
            if (!(v > 0.0)) throw Error("fit_distribution: samples must be positive for " +
                                        std::string(to_string(family)));
    switch (family) {
    case Family::gaussian: {
        const auto m = moments(samples, false);
        if (!(m.var > 0.0)) throw Error("fit_distribution: zero variance");
        DistributionFit f{Family::gaussian, m.mean, std::sqrt(m.var), 0.0};
        f.log_likelihood = log_likelihood(f, samples);
        return f;
    }
    case Family::gamma: return fit_gamma(samples);
    case Family::weibull: return fit_weibull(samples);
    }
    throw Error("fit_distribution: bad family");
}

double log_likelihood(const DistributionFit& f, std::span<const double> x) {
    double ll = 0.0;
    switch (f.family) {
    case Family::gaussian:
        for (double v : x) {
            const double z = (v - f.first) / f.second;
            ll += -0.5 * z * z - std::log(f.second) - 0.5 * std::log(2.0 * std::numbers::pi);
        }
        break;
    case Family::gamma: {
        const double lg = boost::math::lgamma(f.first);
        for (double v : x)
            ll += (f.first - 1.0) * std::log(v) - v / f.second - f.first * std::log(f.second) - lg;
        break;
    }
    case Family::weibull:
        for (double v : x) {
            const double r = v / f.first;
            ll += std::log(f.second / f.first) + (f.second - 1.0) * std::log(r) - std::pow(r, f.second);
        }
        break;
    }
    return ll;
}

} // namespace mmenc
