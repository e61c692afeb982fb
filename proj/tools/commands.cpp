#include "commands.hpp"

#include "mmenc/arrivals.hpp"
#include "mmenc/csv.hpp"
#include "mmenc/distributions.hpp"
#include "mmenc/error.hpp"
#include "mmenc/extraction.hpp"
#include "mmenc/model_json.hpp"
#include "mmenc/synthesis.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace mmenc::cli {

using nlohmann::ordered_json;

ordered_json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

namespace {

constexpr double kNs = 1e9;

fs::path prepare_out(const GlobalOptions& g) {
    std::error_code ec;
    fs::create_directories(g.out, ec);
    if (ec) throw Error("cannot create output directory " + g.out.string() + ": " + ec.message());
    return g.out;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

enum class InputKind { cir, profile };

InputKind input_kind(const fs::path& p) {
    const auto h = read_header(p);
    if (h == "time_s,re,im") return InputKind::cir;
    if (h == "delay_s,power_linear") return InputKind::profile;
    throw ParseError(p.string(), 1, "unrecognized header '" + h + "'");
}

std::optional<double> sidecar_distance(const fs::path& input) {
    auto side = input;
    side.replace_extension(".json");
    if (!fs::exists(side)) return std::nullopt;
    const auto j = read_json_file(side);
    if (!j.contains("distance_m")) return std::nullopt;
    if (!j["distance_m"].is_number()) throw ParseError(side.string(), 1, "distance_m is not a number");
    return j["distance_m"].get<double>();
}

double mean_of(const std::vector<double>& v) {
    return v.empty() ? std::numeric_limits<double>::quiet_NaN()
                     : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return v.empty() ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

struct LoadedInput {
    fs::path path;
    InputKind kind;
    std::optional<ImpulseResponse> cir;
    MultipathProfile base; ///< unthresholded profile input, unused for CIRs
    double total_power = 0.0;

    MultipathProfile at(double threshold_db) const {
        return cir ? detect_paths(*cir, threshold_db) : apply_threshold(base, threshold_db);
    }
};

AnyModel resolve_model(const std::string& spec) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), spec) != names.end()) return preset(spec);
    if (fs::exists(spec)) return read_model_file(spec);
    throw Error("unknown preset or missing model file '" + spec + "'");
}

std::string label_of(const AnyModel& m) {
    return std::visit([](const auto& x) { return x.label; }, m);
}

double sv_horizon_ns(const SvModel& m, double threshold_db) {
    const double depth = std::log(std::pow(10.0, threshold_db / 10.0));
    return (m.cluster_decay + m.ray_decay) * depth;
}

std::string index_name(const std::string& label, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%05zu", i);
    return label + buf;
}

ordered_json config_json(const OfdmConfig& c) {
    ordered_json j;
    j["n_fft"] = c.n_fft;
    j["n_cp"] = c.n_cp;
    j["n_user"] = c.n_user;
    j["n_guard_total"] = c.n_guard_total;
    j["bits_per_symbol"] = c.bits_per_symbol;
    j["bandwidth_hz"] = c.bandwidth_hz;
    j["symbol_period_s"] = c.symbol_period_s();
    return j;
}

OfdmConfig config_from_json(const nlohmann::json& root, const fs::path& path) {
    const auto& j = root.contains("config") ? root["config"] : root;
    try {
        OfdmConfig c;
        c.n_fft = j.at("n_fft").get<std::size_t>();
        c.n_cp = j.at("n_cp").get<std::size_t>();
        c.n_user = j.at("n_user").get<std::size_t>();
        c.n_guard_total = j.contains("n_guard_total") ? j["n_guard_total"].get<std::size_t>() : c.n_fft - c.n_user;
        c.bits_per_symbol = j.at("bits_per_symbol").get<int>();
        c.bandwidth_hz = j.at("bandwidth_hz").get<double>();
        validate(c);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), 1, std::string("bad design file: ") + e.what());
    }
}

} // namespace

fs::path cmd_cir(const GlobalOptions& g, const CirArgs& a) {
    if (a.sweeps.empty()) throw Error("cir: no sweep file given");
    std::vector<FrequencySweep> sweeps;
    for (const auto& p : a.sweeps) sweeps.push_back(read_sweep_csv(p));
    const auto measured = sweeps.size() == 1 ? sweeps.front() : average_sweeps(sweeps);

    std::optional<FrequencySweep> reference;
    if (a.reference) reference = read_sweep_csv(*a.reference);

    SoundingOptions opt;
    opt.window = g.window;
    opt.floor = a.floor;
    opt.reference_distance_m = a.reference_distance_m;
    opt.gate = a.gate_s;
    const auto cir = sounding_to_cir(measured, reference ? &*reference : nullptr, opt);

    const fs::path out = a.output ? *a.output : prepare_out(g) / (a.sweeps.front().stem().string() + "_cir.csv");
    write_file_atomic(out, format_cir_csv(cir));
    return out;
}

ordered_json cmd_extract(const GlobalOptions& g, const ExtractArgs& a) {
    if (a.inputs.empty()) throw Error("extract: no input files");
    const double thr = g.threshold_db;

    std::vector<LoadedInput> inputs;
    for (const auto& p : a.inputs) {
        LoadedInput in{p, input_kind(p), std::nullopt, {}, 0.0};
        if (in.kind == InputKind::cir) {
            in.cir = read_cir_csv(p);
            in.total_power = in.cir->total_power();
        } else {
            in.base = read_profile_csv(p);
            in.total_power = in.base.total_power();
        }
        if (!(in.total_power > 0.0)) throw Error("extract: " + p.string() + " carries no power");
        inputs.push_back(std::move(in));
    }

    std::vector<std::optional<double>> distances(inputs.size());
    if (a.grid) {
        const auto d = tx_rx_distances(receiver_grid(*a.grid));
        if (d.size() != inputs.size())
            throw Error("extract: grid " + *a.grid + " has " + std::to_string(d.size()) + " positions but " +
                        std::to_string(inputs.size()) + " inputs were given");
        for (std::size_t i = 0; i < d.size(); ++i) distances[i] = d[i];
    } else {
        for (std::size_t i = 0; i < inputs.size(); ++i) distances[i] = sidecar_distance(inputs[i].path);
    }

    ordered_json files = ordered_json::array();
    std::vector<double> rds_ns, gamma_ns, gaps;
    std::vector<PathLossSample> pl;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto& in = inputs[i];
        const auto prof = in.at(thr);
        const double rds = rms_delay_spread(prof) * kNs;
        rds_ns.push_back(rds);

        ordered_json f;
        f["file"] = in.path.filename().string();
        f["paths"] = prof.size();
        f["rds_ns"] = rds;
        f["gamma_ns"] = nullptr;
        if (prof.size() >= 2) {
            try {
                const double gm = fit_decay_constant(prof).gamma_s * kNs;
                gamma_ns.push_back(gm);
                f["gamma_ns"] = gm;
            } catch (const Error&) {
                // non-decaying profile: no gamma sample from this file
            }
        }
        const auto g_ns = inter_arrivals_ns(prof);
        gaps.insert(gaps.end(), g_ns.begin(), g_ns.end());
        f["captured_power"] = in.cir ? number(captured_power_fraction(*in.cir, thr))
                                     : number(prof.total_power() / in.total_power);
        const double loss = -10.0 * std::log10(in.total_power);
        f["loss_db"] = loss;
        f["distance_m"] = distances[i] ? number(*distances[i]) : ordered_json(nullptr);
        if (distances[i]) pl.push_back({*distances[i], loss});
        files.push_back(std::move(f));
    }

    ordered_json report;
    report["threshold_db"] = thr;
    report["n_files"] = inputs.size();

    report["path_loss"] = nullptr;
    if (a.path_loss) {
        if (pl.size() != inputs.size())
            throw Error("extract: path loss requested but " + std::to_string(inputs.size() - pl.size()) +
                        " input(s) have no distance_m sidecar");
        const auto fit = fit_path_loss(pl, a.d0_m);
        report["path_loss"] = {{"pl_d0", fit.pl_d0},
                               {"alpha", fit.alpha},
                               {"sigma", fit.sigma},
                               {"d0", fit.d0},
                               {"alpha_stderr", fit.alpha_stderr}};
    }

    report["rds"] = {{"mean", number(mean_of(rds_ns))}, {"std", number(std_of(rds_ns))}};

    ordered_json gam = {{"gaussian", nullptr}, {"gamma", nullptr}, {"weibull", nullptr}};
    auto try_fit = [&](Family fam) -> std::optional<DistributionFit> {
        try {
            return fit_distribution(gamma_ns, fam);
        } catch (const Error&) {
            return std::nullopt;
        }
    };
    if (auto f = try_fit(Family::gaussian)) gam["gaussian"] = {{"mu", f->first}, {"sigma", f->second}};
    if (auto f = try_fit(Family::gamma)) gam["gamma"] = {{"alpha", f->first}, {"beta", f->second}};
    if (auto f = try_fit(Family::weibull)) gam["weibull"] = {{"zeta", f->first}, {"k", f->second}};
    report["gamma"] = gam;

    report["arrivals"] = nullptr;
    if (gaps.size() >= 2) {
        EmOptions em;
        em.seed = stream_seed(g.seed, {kStreamEm});
        const auto af = fit_interarrivals(gaps, em);
        report["arrivals"] = {{"lambda", af.lambda},        {"lambda1", af.lambda1},
                              {"lambda2", af.lambda2},      {"b", af.b},
                              {"n_gaps", af.n_gaps},        {"converged", af.converged},
                              {"single_log_likelihood", af.single_log_likelihood},
                              {"mixture_log_likelihood", af.mixture_log_likelihood}};
    }

    report["files"] = std::move(files);

    ordered_json sweep = ordered_json::array();
    for (double t : a.sweep_thresholds_db) {
        double count = 0.0, rds = 0.0;
        for (const auto& in : inputs) {
            const auto prof = in.at(t);
            count += static_cast<double>(prof.size());
            rds += rms_delay_spread(prof);
        }
        const double n = static_cast<double>(inputs.size());
        sweep.push_back({{"threshold_db", t}, {"mean_path_count", count / n}, {"mean_rds_ns", rds / n * kNs}});
    }
    report["threshold_sweep"] = std::move(sweep);

    write_file_atomic(prepare_out(g) / a.output_name, dump(report));
    return report;
}

std::vector<fs::path> cmd_synth(const GlobalOptions& g, const SynthArgs& a) {
    const AnyModel model = resolve_model(a.model);
    std::visit([](const auto& m) { validate(m); }, model);
    if (!(a.sample_period_s > 0.0)) throw Error("synth: sample period must be positive");

    std::vector<double> distances;
    if (a.grid) {
        distances = tx_rx_distances(receiver_grid(*a.grid));
    } else {
        if (!(a.distance_m > 0.0)) throw Error("synth: distance must be positive");
        distances.assign(a.count, a.distance_m);
    }

    std::vector<fs::path> written;
    if (distances.empty()) return written;
    const auto dir = prepare_out(g);
    const std::string label = label_of(model);

    for (std::size_t i = 0; i < distances.size(); ++i) {
        const std::uint64_t seed = stream_seed(g.seed, {kStreamSynth, i});
        Rng rng(seed);
        Realization r;
        if (const auto* cm = std::get_if<ChannelModel>(&model)) {
            ChannelModel m = *cm;
            if (a.horizon_db) m.threshold_db = *a.horizon_db;
            r = synthesize_cir(m, {a.sample_period_s, distances[i], seed}, rng);
        } else {
            const auto& sv = std::get<SvModel>(model);
            r = synthesize_sv_cir(sv, a.sample_period_s, sv_horizon_ns(sv, a.horizon_db.value_or(g.threshold_db)),
                                  rng, seed);
        }

        ImpulseResponse scaled = r.cir;
        const double amp = std::pow(10.0, r.large_scale_gain_db / 20.0);
        for (auto& s : scaled.samples) s *= amp;

        const auto stem = index_name(label, i);
        const auto prof_path = dir / (stem + "_profile.csv");
        const auto cir_path = dir / (stem + "_cir.csv");
        const auto side_path = dir / (stem + "_cir.json");
        ordered_json side;
        side["seed"] = r.seed;
        side["model_label"] = r.model_label;
        side["large_scale_gain_db"] = r.large_scale_gain_db;
        side["distance_m"] = distances[i];
        write_file_atomic(prof_path, format_profile_csv(r.profile));
        write_file_atomic(cir_path, format_cir_csv(scaled));
        write_file_atomic(side_path, dump(side));
        written.insert(written.end(), {prof_path, cir_path, side_path});
    }
    return written;
}

ordered_json cmd_design(const GlobalOptions& g, const DesignArgs& a) {
    if (a.n_user > a.n_fft) throw Error("design: N_u exceeds N");
    const double ts = 1.0 / a.bandwidth_hz;

    std::optional<double> t_max = a.t_max_s;
    std::optional<MultipathProfile> channel_profile;
    if (a.channel) {
        if (input_kind(*a.channel) == InputKind::cir)
            channel_profile = detect_paths(read_cir_csv(*a.channel), g.threshold_db);
        else
            channel_profile = apply_threshold(read_profile_csv(*a.channel), g.threshold_db);
        if (!t_max) t_max = channel_profile->paths.back().delay_s;
    }

    std::size_t n_cp = 0;
    if (a.n_cp) {
        n_cp = *a.n_cp;
    } else if (channel_profile) {
        n_cp = cp_from_channel(*channel_profile, ts, a.cp_margin);
    } else if (t_max) {
        n_cp = cp_from_length(*t_max, ts, a.cp_margin);
    }
    if (a.n_fft + n_cp >= a.limits.max_block)
        throw Error("design: infeasible, N + N_cp = " + std::to_string(a.n_fft + n_cp) + " reaches the block cap " +
                    std::to_string(a.limits.max_block));

    const auto cfg = make_config(a.n_fft, n_cp, a.n_user, a.bits_per_symbol, a.bandwidth_hz);
    const auto rl = rate_and_latency(cfg);
    DesignEnvelope env;
    env.t_max_s = t_max.value_or(0.0);
    env.speed_mps = a.speed_mps;
    env.carrier_hz = a.carrier_hz;
    env.doppler_hz = doppler_hz(a.speed_mps, a.carrier_hz);
    const auto rep = check_design(cfg, env, a.limits);

    ordered_json j;
    j["config"] = config_json(cfg);
    j["rate_bps"] = rl.data_rate_bps;
    j["latency_s"] = rl.latency_s;
    j["kappa"] = rl.kappa;
    j["t_max_s"] = env.t_max_s;
    j["doppler_hz"] = env.doppler_hz;
    j["constraints"] = {
        {"cyclic_prefix", {{"margin_s", number(rep.cp_margin_s)}, {"ok", rep.cp_ok}}},
        {"doppler",
         {{"product", rep.doppler_product},
          {"limit", a.limits.doppler_factor},
          {"margin", number(rep.doppler_margin)},
          {"ok", rep.doppler_ok}}},
        {"flat_fading",
         {{"ratio", number(rep.flat_fading_ratio)},
          {"limit", a.limits.flat_fading_factor},
          {"ok", rep.flat_fading_ok},
          {"soft", true}}},
        {"block", {{"length", cfg.n_fft + cfg.n_cp}, {"limit", a.limits.max_block}, {"ok", rep.block_ok}}}};
    j["all_ok"] = rep.all_ok();

    write_file_atomic(prepare_out(g) / a.output_name, dump(j));
    return j;
}

BerResult cmd_ber(const GlobalOptions& g, const BerArgs& a) {
    const OfdmConfig cfg = a.design ? config_from_json(read_json_file(*a.design), *a.design) : a.config;
    validate(cfg);
    const auto grid = parse_grid(a.grid);
    const double ts = cfg.symbol_period_s();

    BerCurve curve;
    std::string label;
    if (a.channel.rfind("rayleigh:", 0) == 0) {
        const auto taps_text = a.channel.substr(9);
        std::size_t taps = 0;
        try {
            std::size_t used = 0;
            taps = std::stoul(taps_text, &used);
            if (used != taps_text.size()) throw std::invalid_argument("trailing text");
        } catch (const std::exception&) {
            throw Error("ber: bad channel spec '" + a.channel + "' (expected rayleigh:L)");
        }
        if (taps == 0) throw Error("ber: rayleigh channel needs at least one tap");
        if (taps > cfg.n_cp + 1)
            throw Error("ber: channel length " + std::to_string(taps) + " samples exceeds cyclic prefix N_cp + 1 = " +
                        std::to_string(cfg.n_cp + 1));
        label = "rayleigh_" + std::to_string(taps);
        const ChannelDraw draw = [taps, ts](Rng& rng) { return rayleigh_tdl(taps, ts, rng).cir; };
        curve = simulate_ber(cfg, draw, grid, a.stop, g.seed, label);
    } else {
        ImpulseResponse h;
        const auto names = preset_names();
        if (std::find(names.begin(), names.end(), a.channel) != names.end() || fs::path(a.channel).extension() == ".json") {
            const AnyModel model = resolve_model(a.channel);
            label = label_of(model);
            const std::uint64_t seed = stream_seed(g.seed, {kStreamSynth, 0});
            Rng rng(seed);
            if (const auto* cm = std::get_if<ChannelModel>(&model)) {
                ChannelModel m = *cm;
                m.threshold_db = a.horizon_db;
                h = synthesize_cir(m, {ts, 1.0, seed}, rng).cir;
            } else {
                const auto& sv = std::get<SvModel>(model);
                h = synthesize_sv_cir(sv, ts, sv_horizon_ns(sv, a.horizon_db), rng, seed).cir;
            }
        } else if (fs::exists(a.channel)) {
            h = read_cir_csv(a.channel);
            label = fs::path(a.channel).stem().string();
        } else {
            throw Error("ber: unknown channel source '" + a.channel + "'");
        }
        curve = simulate_ber(cfg, h, grid, a.stop, g.seed, label);
    }

    std::ostringstream csv;
    csv << "ebn0_db,ber,bits,errors";
    if (a.theory) csv << ",awgn_theory,rayleigh_theory";
    csv << '\n';
    for (const auto& p : curve.points) {
        csv << format_double(p.eb_n0_db) << ',' << format_double(p.ber) << ',' << p.bits << ',' << p.errors;
        if (a.theory) csv << ',' << format_double(bpsk_awgn_ber(p.eb_n0_db)) << ',' << format_double(bpsk_rayleigh_ber(p.eb_n0_db));
        csv << '\n';
    }
    const fs::path out = a.output ? *a.output : prepare_out(g) / ("ber_" + label + ".csv");
    write_file_atomic(out, csv.str());
    return {out, std::move(curve)};
}

std::vector<std::string> cmd_preset_list() { return preset_names(); }

ordered_json cmd_preset_show(const std::string& name) { return to_json(preset(name)); }

} // namespace mmenc::cli
