#include "mmenc/extraction.hpp"

#include "mmenc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mmenc {

double MultipathProfile::total_power() const noexcept {
    double s = 0.0;
    for (const auto& p : paths) s += p.power;
    return s;
}

double MultipathProfile::peak_power() const noexcept {
    double m = 0.0;
    for (const auto& p : paths) m = std::max(m, p.power);
    return m;
}

void validate(const MultipathProfile& profile) {
    const double floor = profile.peak_power() * std::pow(10.0, -profile.threshold_db / 10.0);
    for (std::size_t i = 0; i < profile.paths.size(); ++i) {
        const auto& p = profile.paths[i];
        if (!(p.power > 0.0) || !std::isfinite(p.power)) throw Error("profile: non-positive path power");
        if (!std::isfinite(p.delay_s)) throw Error("profile: non-finite delay");
        if (i > 0 && !(p.delay_s > profile.paths[i - 1].delay_s))
            throw Error("profile: delays must be strictly increasing");
        if (p.power < floor * (1.0 - 1e-12)) throw Error("profile: path below threshold");
    }
}

MultipathProfile detect_paths(const ImpulseResponse& cir, double threshold_db) {
    if (!(threshold_db > 0.0)) throw Error("detect_paths: threshold must be positive");
    const std::size_t n = cir.samples.size();
    std::vector<double> p(n);
    for (std::size_t k = 0; k < n; ++k) p[k] = std::norm(cir.samples[k]);
    const double peak = n ? *std::max_element(p.begin(), p.end()) : 0.0;
    if (!(peak > 0.0)) throw Error("detect_paths: all-zero impulse response");
    const double floor = peak * std::pow(10.0, -threshold_db / 10.0);

    MultipathProfile out;
    out.threshold_db = threshold_db;
    for (std::size_t k = 0; k < n; ++k) {
        if (p[k] < floor) continue;
        if (k > 0 && !(p[k] > p[k - 1])) continue;
        if (k + 1 < n && !(p[k] > p[k + 1])) continue;
        out.paths.push_back({cir.time_s(k), p[k]});
    }
    return out;
}

MultipathProfile apply_threshold(const MultipathProfile& profile, double threshold_db) {
    if (!(threshold_db > 0.0)) throw Error("apply_threshold: threshold must be positive");
    const double floor = profile.peak_power() * std::pow(10.0, -threshold_db / 10.0);
    MultipathProfile out;
    out.threshold_db = threshold_db;
    std::copy_if(profile.paths.begin(), profile.paths.end(), std::back_inserter(out.paths),
                 [floor](const Path& p) { return p.power >= floor; });
    return out;
}

double captured_power_fraction(const ImpulseResponse& cir, double threshold_db) {
    double peak = 0.0, total = 0.0;
    for (const auto& s : cir.samples) {
        const double p = std::norm(s);
        peak = std::max(peak, p);
        total += p;
    }
    if (!(peak > 0.0)) throw Error("captured_power_fraction: all-zero impulse response");
    if (std::isinf(threshold_db) && threshold_db > 0) return 1.0;
    const double floor = peak * std::pow(10.0, -threshold_db / 10.0);
    double kept = 0.0;
    for (const auto& s : cir.samples) {
        const double p = std::norm(s);
        if (p >= floor) kept += p;
    }
    return kept / total;
}

double rms_delay_spread(const MultipathProfile& profile) {
    if (profile.empty()) throw Error("rms_delay_spread: empty profile");
    // centre on the first delay so the moments stay well conditioned
    const double ref = profile.paths.front().delay_s;
    double w = 0.0, m1 = 0.0, m2 = 0.0;
    for (const auto& p : profile.paths) {
        const double t = p.delay_s - ref;
        w += p.power;
        m1 += p.power * t;
        m2 += p.power * t * t;
    }
    if (!(w > 0.0)) throw Error("rms_delay_spread: zero total power");
    m1 /= w;
    m2 /= w;
    return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

PathLossFit fit_path_loss(std::span<const PathLossSample> points, double d0_m) {
    if (!(d0_m > 0.0)) throw Error("fit_path_loss: reference distance must be positive");
    if (points.size() < 2) throw Error("fit_path_loss: need at least 2 points");
    const std::size_t n = points.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(points[i].distance_m > 0.0)) throw Error("fit_path_loss: distances must be positive");
        x[i] = 10.0 * std::log10(points[i].distance_m / d0_m);
        y[i] = points[i].loss_db;
    }
    const double xm = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    if (!(sxx > 1e-12 * (1.0 + xm * xm))) throw Error("fit_path_loss: degenerate design (all distances equal)");

    PathLossFit fit;
    fit.d0 = d0_m;
    fit.alpha = sxy / sxx;
    fit.pl_d0 = ym - fit.alpha * xm;
    fit.residuals.resize(n);
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        fit.residuals[i] = y[i] - (fit.pl_d0 + fit.alpha * x[i]);
        ssr += fit.residuals[i] * fit.residuals[i];
    }
    fit.sigma = std::sqrt(ssr / static_cast<double>(n));
    fit.alpha_stderr = n > 2 ? std::sqrt(ssr / static_cast<double>(n - 2) / sxx) : 0.0;
    return fit;
}

DecayFit fit_decay_constant(const MultipathProfile& profile) {
    if (profile.size() < 2) throw Error("fit_decay_constant: need at least 2 paths");
    const auto& first = profile.paths.front();
    if (!(first.power > 0.0)) throw Error("fit_decay_constant: non-positive reference power");
    double sxy = 0.0, sxx = 0.0;
    for (const auto& p : profile.paths) {
        if (!(p.power > 0.0)) throw Error("fit_decay_constant: non-positive path power");
        const double x = p.delay_s - first.delay_s;
        const double y = std::log(p.power / first.power);
        sxx += x * x;
        sxy += x * y;
    }
    if (!(sxx > 0.0)) throw Error("fit_decay_constant: all paths at the same delay");
    const double slope = sxy / sxx;
    if (!(slope < 0.0)) throw Error("fit_decay_constant: profile does not decay (non-positive gamma)");

    DecayFit fit;
    fit.gamma_s = -1.0 / slope;
    constexpr double db_per_neper = 10.0 / 2.302585092994046;
    double se = 0.0;
    for (const auto& p : profile.paths) {
        const double x = p.delay_s - first.delay_s;
        const double r = db_per_neper * (std::log(p.power / first.power) - slope * x);
        se += r * r;
    }
    fit.rmse_db = std::sqrt(se / static_cast<double>(profile.size()));
    return fit;
}

std::vector<ThresholdSweepRow> rds_threshold_sweep(std::span<const ImpulseResponse> cirs,
                                                   std::span<const double> thresholds_db) {
    std::vector<ThresholdSweepRow> rows;
    rows.reserve(thresholds_db.size());
    for (double thr : thresholds_db) {
        ThresholdSweepRow row{thr, 0.0, 0.0};
        for (const auto& cir : cirs) {
            const auto prof = detect_paths(cir, thr);
            row.mean_path_count += static_cast<double>(prof.size());
            row.mean_rds_s += rms_delay_spread(prof);
        }
        if (!cirs.empty()) {
            row.mean_path_count /= static_cast<double>(cirs.size());
            row.mean_rds_s /= static_cast<double>(cirs.size());
        }
        rows.push_back(row);
    }
    return rows;
}

MultipathProfile ensemble_pdp(std::span<const ImpulseResponse> cirs, std::size_t bin_samples) {
    if (cirs.empty()) throw Error("ensemble_pdp: no impulse responses");
    if (bin_samples == 0) throw Error("ensemble_pdp: zero bin width");
    const double ts = cirs.front().sample_period_s;
    const double t0 = cirs.front().t0_s;
    std::size_t len = 0;
    for (const auto& c : cirs) {
        if (std::abs(c.sample_period_s - ts) > 1e-12 * ts || std::abs(c.t0_s - t0) > 1e-6 * ts)
            throw Error("ensemble_pdp: impulse responses on different grids");
        len = std::max(len, c.samples.size());
    }
    std::vector<double> acc(len, 0.0);
    for (const auto& c : cirs)
        for (std::size_t k = 0; k < c.samples.size(); ++k) acc[k] += std::norm(c.samples[k]);

    MultipathProfile out;
    out.threshold_db = std::numeric_limits<double>::infinity();
    const double denom = static_cast<double>(cirs.size() * bin_samples);
    for (std::size_t b = 0; b * bin_samples < len; ++b) {
        const std::size_t lo = b * bin_samples, hi = std::min(len, lo + bin_samples);
        const double sum = std::accumulate(acc.begin() + static_cast<std::ptrdiff_t>(lo),
                                           acc.begin() + static_cast<std::ptrdiff_t>(hi), 0.0);
        if (sum > 0.0) {
            const double centre = t0 + ts * (static_cast<double>(lo) + 0.5 * static_cast<double>(bin_samples - 1));
            out.paths.push_back({centre, sum / denom});
        }
    }
    return out;
}

ReceiverGrid receiver_grid(std::string_view scenario) {
    auto span_cm = [](double lo, double hi, int steps) {
        std::vector<double> v(static_cast<std::size_t>(steps));
        for (int i = 0; i < steps; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
        return v;
    };
    std::vector<double> xs, ys = span_cm(5, 30, 6), zs;
    Point3 tx;
    if (scenario == "sc1") {
        xs = span_cm(15, 85, 8);
        zs = {15, 30};
        tx = {65, 15, 0};
    } else if (scenario == "sc2") {
        xs = span_cm(15, 85, 8);
        zs = {35, 140};
        tx = {65, 15, 0};
    } else if (scenario == "sc3") {
        xs = span_cm(15, 40, 6);
        zs = {35, 140};
        tx = {15, 15, 0};
    } else {
        throw Error("receiver_grid: unknown scenario '" + std::string(scenario) + "'");
    }
    ReceiverGrid g;
    g.tx = {tx.x / 100, tx.y / 100, tx.z / 100};
    for (double z : zs)
        for (double y : ys)
            for (double x : xs) g.rx.push_back({x / 100, y / 100, z / 100});
    return g;
}

std::vector<double> tx_rx_distances(const ReceiverGrid& grid) {
    std::vector<double> d;
    d.reserve(grid.rx.size());
    for (const auto& r : grid.rx)
        d.push_back(std::hypot(r.x - grid.tx.x, r.y - grid.tx.y, r.z - grid.tx.z));
    return d;
}

} // namespace mmenc
