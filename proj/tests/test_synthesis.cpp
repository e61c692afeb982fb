#include "oracles.hpp"

#include "mmenc/error.hpp"
#include "mmenc/extraction.hpp"
#include "mmenc/model_json.hpp"
#include "mmenc/synthesis.hpp"

#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>

using namespace mmenc;

namespace {

const ChannelModel& sc1() {
    static const ChannelModel m = std::get<ChannelModel>(preset("sc1"));
    return m;
}

// slope of ln p against t over the PDP bins, skipping the first
double pdp_decay_ns(const std::vector<ImpulseResponse>& cirs, std::size_t bin, double t_max_s) {
    auto pdp = ensemble_pdp(cirs, bin);
    std::vector<Path> kept;
    for (std::size_t i = 1; i < pdp.paths.size(); ++i)
        if (pdp.paths[i].delay_s <= t_max_s) kept.push_back(pdp.paths[i]);
    double xm = 0, ym = 0;
    for (auto& p : kept) {
        xm += p.delay_s / kept.size();
        ym += std::log(p.power) / kept.size();
    }
    double sxy = 0, sxx = 0;
    for (auto& p : kept) {
        sxy += (p.delay_s - xm) * (std::log(p.power) - ym);
        sxx += (p.delay_s - xm) * (p.delay_s - xm);
    }
    return -1.0 / (sxy / sxx) * 1e9;
}

} // namespace

TEST_CASE("presets") {
    const auto& m = sc1();
    CHECK(m.gamma_mean_ns == 175.23);
    CHECK(m.gamma_std_ns == 4.90);
    CHECK(m.pl_d0 == 54.711);
    CHECK(m.alpha == 0.02);
    CHECK(m.sigma_pl == 0.39);
    CHECK(m.mean_rds_ns == 113.4);
    CHECK(m.lambda == 0.985);
    CHECK(m.lambda1 == 0.083);
    CHECK(m.lambda2 == 1.180);
    CHECK(m.b == 0.015);
    CHECK(std::get<ChannelModel>(preset("sc3")).alpha == 0.002);
    CHECK(std::get<ChannelModel>(preset("sc2")).mean_rds_ns == 159.1);
    CHECK(std::get<ChannelModel>(preset("sc3")).mean_rds_ns == 158.3);
    const auto cm4 = std::get<SvModel>(preset("cm4"));
    CHECK(cm4.cluster_rate == 0.07);
    CHECK(cm4.cluster_decay == 19.44);
    CHECK(cm4.ray_decay == 0.42);
    CHECK(preset_names().size() == 6);
    CHECK_THROWS_AS(preset("sc4"), Error);
    for (const auto& n : preset_names()) std::visit([](const auto& x) { validate(x); }, preset(n));
}

TEST_CASE("model JSON round trip") {
    for (const auto& n : preset_names()) {
        const auto m = preset(n);
        const auto back = model_from_json(nlohmann::json::parse(to_json(m).dump()));
        CHECK(to_json(back).dump() == to_json(m).dump());
    }
    CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"label":"x"})")), Error);
}

TEST_CASE("arrivals: pure Poisson limit and mixture mean") {
    ChannelModel m = sc1();
    m.b = 0.0;
    Rng rng(1);
    const auto t = draw_arrivals(m, 1e6 / m.lambda2, rng);
    const double mean_gap = t.back() / static_cast<double>(t.size() - 1);
    CHECK(mean_gap == doctest::Approx(1.0 / m.lambda2).epsilon(0.005));
    CHECK(t.front() == 0.0);
    CHECK(std::adjacent_find(t.begin(), t.end(), std::greater_equal<>()) == t.end());

    Rng rng2(2);
    const auto u = draw_arrivals(sc1(), 2e6, rng2);
    const double expected = 0.015 / 0.083 + 0.985 / 1.180;
    CHECK(expected == doctest::Approx(1.015).epsilon(0.001));
    CHECK(u.back() / static_cast<double>(u.size() - 1) == doctest::Approx(expected).epsilon(0.01));

    Rng rng3(3);
    CHECK(draw_arrivals(sc1(), 1e-9, rng3).size() == 1);
    CHECK_THROWS_AS(draw_arrivals(sc1(), 0.0, rng3), Error);
}

TEST_CASE("generation horizon") {
    CHECK(generation_horizon_ns(175.23, 30) == doctest::Approx(175.23 * std::log(1000.0)));
    CHECK(generation_horizon_ns(175.23, 30) == doctest::Approx(1210.5).epsilon(1e-4));
}

TEST_CASE("synthesize_cir structure and determinism") {
    SynthesisOptions opt{0.2e-9, 0.5, 11};
    Rng a(11), b(11);
    const auto r1 = synthesize_cir(sc1(), opt, a);
    const auto r2 = synthesize_cir(sc1(), opt, b);
    CHECK(r1.cir.samples == r2.cir.samples);
    CHECK(r1.profile.paths == r2.profile.paths);
    CHECK(r1.large_scale_gain_db == r2.large_scale_gain_db);
    CHECK(r1.seed == 11);
    CHECK(r1.model_label == "sc1");

    CHECK(r1.profile.total_power() == doctest::Approx(1.0).epsilon(1e-12));
    validate(r1.profile);
    CHECK(r1.profile.paths.front().delay_s == 0.0);
    // expected powers follow the decay exactly
    const auto& p = r1.profile.paths;
    const double g = -(p[5].delay_s - p[0].delay_s) / std::log(p[5].power / p[0].power);
    for (std::size_t i = 1; i < p.size(); i += 97)
        CHECK(p[i].power / p[0].power == doctest::Approx(std::exp(-(p[i].delay_s) / g)).epsilon(1e-9));

    CHECK_THROWS_AS(synthesize_cir(sc1(), {0.2e-9, 0.0, 0}, a), Error);
    CHECK_THROWS_AS(synthesize_cir(sc1(), {0.0, 1.0, 0}, a), Error);
}

TEST_CASE("ensemble statistics of synthesize_cir") {
    const std::size_t n = 1000;
    std::vector<double> gains, power;
    std::vector<ImpulseResponse> cirs;
    ChannelModel limit = sc1();
    limit.gamma_std_ns = 0.0;
    limit.b = 0.0;
    limit.lambda2 = 20.0;
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = make_rng(5, {i});
        const auto r = synthesize_cir(sc1(), {0.2e-9, 0.4, i}, rng);
        gains.push_back(r.large_scale_gain_db);
        power.push_back(r.cir.total_power());
        Rng rng2 = make_rng(6, {i});
        cirs.push_back(synthesize_cir(limit, {0.2e-9, 1.0, i}, rng2).cir);
    }
    const double mu = -(54.711 + 0.02 * 10 * std::log10(0.4));
    CHECK(std::abs(oracle::mean(gains) - mu) < 3 * 0.39 / std::sqrt(double(n)));
    CHECK(oracle::mean(power) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(pdp_decay_ns(cirs, 50, 1000e-9) == doctest::Approx(175.23).epsilon(0.02));
}

TEST_CASE("Saleh-Valenzuela generator") {
    SvModel single{1e-9, 2.0, 20.0, 60.0, 0.0, 0.0, "one"};
    Rng rng(4);
    const auto r = synthesize_sv_cir(single, 0.2e-9, 500.0, rng);
    const auto& p = r.profile.paths;
    REQUIRE(p.size() > 10);
    for (std::size_t i = 1; i < p.size(); ++i)
        CHECK(p[i].power / p[0].power == doctest::Approx(std::exp(-p[i].delay_s * 1e9 / 60.0)).epsilon(1e-9));
    validate(r.profile);

    std::vector<ImpulseResponse> cirs;
    for (std::size_t i = 0; i < 1000; ++i) {
        Rng g = make_rng(8, {i});
        cirs.push_back(synthesize_sv_cir(single, 0.2e-9, 600.0, g).cir);
    }
    CHECK(pdp_decay_ns(cirs, 25, 400e-9) == doctest::Approx(60.0).epsilon(0.02));

    // with a negligible ray rate every cluster carries one ray: count clusters
    SvModel cm9 = std::get<SvModel>(preset("cm9"));
    cm9.ray_rate = 1e-12;
    cm9.sigma_cluster = cm9.sigma_ray = 0.0;
    std::vector<double> extra;
    for (std::size_t i = 0; i < 4000; ++i) {
        Rng g = make_rng(9, {i});
        extra.push_back(double(synthesize_sv_cir(cm9, 0.2e-9, 300.0, g).profile.size() - 1));
    }
    const double lam = 0.044 * 300.0;
    CHECK(lam == doctest::Approx(13.2));
    CHECK(std::abs(oracle::mean(extra) - lam) < 3 * std::sqrt(lam / extra.size()));

    Rng z(1);
    CHECK_THROWS_AS(synthesize_sv_cir(single, 0.2e-9, 0.0, z), Error);
}

TEST_CASE("Rayleigh tapped delay line") {
    Rng rng(10);
    const auto ten = rayleigh_tdl(10, 0.2e-9, rng);
    CHECK(ten.cir.samples.size() == 10);
    CHECK(ten.profile.total_power() == doctest::Approx(1.0));

    const std::size_t n = 100000;
    double sum = 0.0, above = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = std::norm(rayleigh_tdl(1, 0.2e-9, rng).cir.samples[0]);
        sum += p;
        above += p > 1.0;
        total += rayleigh_tdl(4, 0.2e-9, rng).cir.total_power();
    }
    CHECK(sum / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(total / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(above / n == doctest::Approx(std::exp(-1.0)).epsilon(0.02));
    CHECK_THROWS_AS(rayleigh_tdl(0, 0.2e-9, rng), Error);
}

TEST_CASE("normalize unit power") {
    Rng rng(3);
    auto r = synthesize_cir(sc1(), {}, rng);
    for (auto& p : r.profile.paths) p.power *= 7.0;
    const auto n1 = normalize_unit_power(r);
    CHECK(n1.profile.total_power() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(n1.cir.total_power() == doctest::Approx(1.0).epsilon(1e-12));
    const auto n2 = normalize_unit_power(n1);
    CHECK(n2.profile.total_power() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rms_delay_spread(n1.profile) == doctest::Approx(rms_delay_spread(r.profile)).epsilon(1e-12));
    CHECK_THROWS_AS(normalize_unit_power(Realization{}), Error);
}
