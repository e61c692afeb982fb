#include "oracles.hpp"

#include "mmenc/error.hpp"
#include "mmenc/extraction.hpp"
#include "mmenc/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace mmenc;

namespace {

ImpulseResponse impulses(std::size_t n, std::initializer_list<std::pair<std::size_t, double>> taps, double ts = 0.2e-9) {
    ImpulseResponse h{ts, 0.0, CVec(n)};
    for (auto [k, p] : taps) h.samples[k] = std::sqrt(p);
    return h;
}

MultipathProfile profile(std::initializer_list<Path> paths, double thr = 30.0) {
    return {std::vector<Path>(paths), thr};
}

} // namespace

TEST_CASE("detect paths") {
    const auto one = detect_paths(impulses(50, {{17, 2.0}}));
    REQUIRE(one.size() == 1);
    CHECK(one.paths[0].delay_s == doctest::Approx(17 * 0.2e-9));
    CHECK(one.paths[0].power == doctest::Approx(2.0));

    CHECK(detect_paths(impulses(50, {{3, 1.0}, {30, std::pow(10.0, -3.5)}}), 30.0).size() == 1);
    CHECK(detect_paths(impulses(50, {{3, 1.0}, {30, std::pow(10.0, -3.5)}}), 40.0).size() == 2);

    // endpoints compare with their single neighbour
    CHECK(detect_paths(impulses(5, {{0, 1.0}, {4, 0.5}})).size() == 2);
    // plateaus are not strict maxima
    CHECK(detect_paths(impulses(6, {{2, 1.0}, {3, 1.0}})).size() == 0);

    CHECK_THROWS_AS(detect_paths(impulses(10, {})), Error);
    CHECK_THROWS_AS(detect_paths(impulses(10, {{1, 1.0}}), 0.0), Error);
}

TEST_CASE("planted 50-path profile in -80 dB noise") {
    Rng rng(7);
    std::uniform_real_distribution<double> db(-45.0, -1.0);
    std::normal_distribution<double> g;
    const std::size_t n = 400;
    ImpulseResponse h{0.2e-9, 0.0, CVec(n)};
    std::vector<std::pair<std::size_t, double>> planted;
    for (std::size_t i = 0; i < 50; ++i) {
        const double p = i == 0 ? 1.0 : std::pow(10.0, db(rng) / 10.0);
        planted.emplace_back(3 + 7 * i, p);
    }
    const double noise = std::sqrt(1e-8 / 2);
    for (auto& s : h.samples) s = cplx(g(rng), g(rng)) * noise;
    for (auto [k, p] : planted) h.samples[k] += std::polar(std::sqrt(p), 0.3 * double(k));

    const auto prof = detect_paths(h, 30.0);
    std::set<std::size_t> expected, found;
    for (auto [k, p] : planted)
        if (p >= 1e-3) expected.insert(k);
    for (const auto& p : prof.paths) found.insert(static_cast<std::size_t>(std::llround(p.delay_s / 0.2e-9)));
    CHECK(found == expected);
    validate(prof);
}

TEST_CASE("detect paths is monotone in threshold") {
    Rng rng(3);
    std::normal_distribution<double> g;
    ImpulseResponse h{0.2e-9, 0.0, CVec(2000)};
    for (std::size_t k = 0; k < h.samples.size(); ++k)
        h.samples[k] = cplx(g(rng), g(rng)) * std::exp(-double(k) / 600.0);
    std::vector<Path> prev;
    for (double t = 5; t <= 60; t += 5) {
        const auto cur = detect_paths(h, t).paths;
        CHECK(cur.size() >= prev.size());
        CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end(),
                            [](const Path& a, const Path& b) { return a.delay_s < b.delay_s; }));
        prev = cur;
    }
}

TEST_CASE("apply threshold") {
    const auto p = profile({{0, 1.0}, {1e-9, 1e-2}, {2e-9, 1e-4}}, 100);
    CHECK(apply_threshold(p, 30).size() == 2);
    CHECK(apply_threshold(p, 40).size() == 3);
    CHECK(apply_threshold(p, 30).threshold_db == 30);
}

TEST_CASE("captured power fraction") {
    const auto h = impulses(20, {{2, 1.0}, {9, 1e-4}});
    CHECK(captured_power_fraction(h, std::numeric_limits<double>::infinity()) == 1.0);
    CHECK(captured_power_fraction(impulses(20, {{2, 1.0}, {9, 1.0}}), 30) == 1.0);
    CHECK(captured_power_fraction(h, 30) == doctest::Approx(1.0 / (1.0 + 1e-4)));
    CHECK_THROWS_AS(captured_power_fraction(impulses(5, {}), 30), Error);
}

TEST_CASE("rms delay spread") {
    CHECK(rms_delay_spread(profile({{3e-9, 1.0}})) == 0.0);
    CHECK(rms_delay_spread(profile({{0, 1.0}, {10e-9, 1.0}})) == doctest::Approx(5e-9));
    const auto p = profile({{0, 1.0}, {10e-9, 1.0}, {20e-9, 2.0}});
    CHECK(rms_delay_spread(p) == doctest::Approx(std::sqrt(225.0 - 156.25) * 1e-9));

    auto shifted = p;
    for (auto& x : shifted.paths) {
        x.delay_s += 123e-9;
        x.power *= 17.0;
    }
    CHECK(rms_delay_spread(shifted) == doctest::Approx(rms_delay_spread(p)).epsilon(1e-12));
    CHECK_THROWS_AS(rms_delay_spread(MultipathProfile{}), Error);
}

TEST_CASE("path loss fit") {
    std::vector<PathLossSample> exact;
    for (double d : {0.2, 0.35, 0.5, 0.8}) exact.push_back({d, 54.711 + 0.021 * 10 * std::log10(d)});
    const auto f = fit_path_loss(exact);
    CHECK(f.pl_d0 == doctest::Approx(54.711).epsilon(1e-12));
    CHECK(f.alpha == doctest::Approx(0.021).epsilon(1e-9));
    CHECK(f.sigma < 1e-12);

    // planted alpha = 2, sigma = 0.5 on the 96-point grid
    const auto d = tx_rx_distances(receiver_grid("sc1"));
    REQUIRE(d.size() == 96);
    Rng rng(12);
    std::normal_distribution<double> g(0.0, 0.5);
    std::vector<PathLossSample> pts;
    for (double x : d) pts.push_back({x, 50.0 + 2.0 * 10 * std::log10(x) + g(rng)});
    const auto p = fit_path_loss(pts);
    // closed-form OLS standard error with the planted sigma
    double xm = 0.0;
    for (double x : d) xm += 10 * std::log10(x) / d.size();
    double sxx = 0.0;
    for (double x : d) sxx += std::pow(10 * std::log10(x) - xm, 2);
    CHECK(std::abs(p.alpha - 2.0) < 3 * 0.5 / std::sqrt(sxx));
    CHECK(p.alpha_stderr == doctest::Approx(0.5 / std::sqrt(sxx)).epsilon(0.3));
    double rsum = 0.0;
    for (double r : p.residuals) rsum += r;
    CHECK(std::abs(rsum) < 1e-9);
    CHECK(p.sigma >= 0.0);

    auto lifted = pts;
    for (auto& s : lifted) s.loss_db += 7.5;
    const auto q = fit_path_loss(lifted);
    CHECK(q.alpha == doctest::Approx(p.alpha).epsilon(1e-10));
    CHECK(q.pl_d0 == doctest::Approx(p.pl_d0 + 7.5).epsilon(1e-12));

    // reference distance only moves the intercept
    const auto r = fit_path_loss(pts, 0.5);
    CHECK(r.alpha == doctest::Approx(p.alpha).epsilon(1e-10));
    CHECK(r.pl_d0 == doctest::Approx(p.pl_d0 + p.alpha * 10 * std::log10(0.5)).epsilon(1e-12));

    std::vector<PathLossSample> same{{1.0, 1.0}, {1.0, 2.0}, {1.0, 3.0}};
    CHECK_THROWS_AS(fit_path_loss(same), Error);
    CHECK_THROWS_AS(fit_path_loss(std::vector<PathLossSample>{{1.0, 1.0}}), Error);
    CHECK_THROWS_AS(fit_path_loss(std::vector<PathLossSample>{{0.0, 1.0}, {1.0, 1.0}}), Error);
}

TEST_CASE("decay fit") {
    const double gamma = 170.916e-9;
    MultipathProfile exact;
    exact.threshold_db = 100;
    for (int i = 0; i < 60; ++i) exact.paths.push_back({i * 3e-9, std::exp(-i * 3e-9 / gamma)});
    const auto f = fit_decay_constant(exact);
    CHECK(f.gamma_s == doctest::Approx(gamma).epsilon(1e-10));
    CHECK(f.rmse_db < 1e-9);

    auto scaled = exact;
    for (auto& p : scaled.paths) p.power *= 3e-5;
    CHECK(fit_decay_constant(scaled).gamma_s == doctest::Approx(gamma).epsilon(1e-10));

    // +-3 dB uniform jitter on every path but the reference
    Rng rng(99);
    std::uniform_real_distribution<double> jit(-3.0, 3.0);
    MultipathProfile noisy;
    noisy.threshold_db = 100;
    for (int i = 0; i < 500; ++i) {
        const double t = i * 2e-9;
        const double j = i == 0 ? 0.0 : jit(rng);
        noisy.paths.push_back({t, std::exp(-t / 200e-9) * std::pow(10.0, j / 10)});
    }
    CHECK(fit_decay_constant(noisy).gamma_s == doctest::Approx(200e-9).epsilon(0.05));

    CHECK_THROWS_AS(fit_decay_constant(profile({{0, 1.0}})), Error);
    CHECK_THROWS_AS(fit_decay_constant(profile({{0, 1.0}, {1e-9, 2.0}})), Error);
}

TEST_CASE("threshold sweep and ensemble PDP") {
    std::vector<ImpulseResponse> single{impulses(10, {{3, 1.0}}), impulses(10, {{5, 2.0}})};
    const std::vector<double> thr{10, 20, 30};
    for (const auto& row : rds_threshold_sweep(single, thr)) {
        CHECK(row.mean_path_count == 1.0);
        CHECK(row.mean_rds_s == 0.0);
    }

    Rng rng(5);
    std::normal_distribution<double> g;
    std::vector<ImpulseResponse> many;
    for (int i = 0; i < 20; ++i) {
        ImpulseResponse h{0.2e-9, 0.0, CVec(500)};
        for (std::size_t k = 0; k < 500; ++k) h.samples[k] = cplx(g(rng), g(rng)) * std::exp(-double(k) / 200.0);
        many.push_back(h);
    }
    const std::vector<double> ts{5, 10, 15, 20, 25, 30};
    const auto rows = rds_threshold_sweep(many, ts);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].mean_path_count >= rows[i - 1].mean_path_count);

    std::vector<ImpulseResponse> two{impulses(4, {{0, 1.0}, {3, 4.0}}), impulses(2, {{0, 3.0}})};
    const auto pdp = ensemble_pdp(two, 2);
    REQUIRE(pdp.size() == 2);
    CHECK(pdp.paths[0].power == doctest::Approx((1.0 + 3.0) / 4));
    CHECK(pdp.paths[0].delay_s == doctest::Approx(0.1e-9));
    CHECK(pdp.paths[1].power == doctest::Approx(4.0 / 4));
    CHECK_THROWS_AS(ensemble_pdp(std::vector<ImpulseResponse>{}, 2), Error);
}

TEST_CASE("measurement grids") {
    CHECK(receiver_grid("sc1").rx.size() == 96);
    CHECK(receiver_grid("sc2").rx.size() == 96);
    CHECK(receiver_grid("sc3").rx.size() == 72);
    const auto g = receiver_grid("sc1");
    CHECK(g.rx.front().x == doctest::Approx(0.15));
    CHECK(g.rx.front().y == doctest::Approx(0.05));
    CHECK(g.rx.front().z == doctest::Approx(0.15));
    const auto d = tx_rx_distances(g);
    CHECK(d.front() == doctest::Approx(std::hypot(0.5, 0.1, 0.15)));
    CHECK_THROWS_AS(receiver_grid("sc4"), Error);
}
