#include "mmenc/model_json.hpp"

#include "mmenc/error.hpp"

#include <fstream>

namespace mmenc {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json to_json(const ChannelModel& m) {
    ordered_json j;
    j["label"] = m.label;
    j["pl_d0"] = m.pl_d0;
    j["alpha"] = m.alpha;
    j["sigma_pl"] = m.sigma_pl;
    j["gamma_dist"] = {{"mu", m.gamma_mean_ns}, {"sigma", m.gamma_std_ns}};
    j["lambda"] = m.lambda;
    j["arrival"] = {{"lambda1", m.lambda1}, {"lambda2", m.lambda2}, {"b", m.b}};
    j["mean_rds"] = m.mean_rds_ns;
    j["threshold_db"] = m.threshold_db;
    return j;
}

ordered_json to_json(const SvModel& m) {
    ordered_json j;
    j["label"] = m.label;
    j["cluster_rate"] = m.cluster_rate;
    j["ray_rate"] = m.ray_rate;
    j["cluster_decay"] = m.cluster_decay;
    j["ray_decay"] = m.ray_decay;
    j["sigma_cluster"] = m.sigma_cluster;
    j["sigma_ray"] = m.sigma_ray;
    return j;
}

ordered_json to_json(const AnyModel& m) {
    return std::visit([](const auto& v) { return to_json(v); }, m);
}

AnyModel model_from_json(const json& j) {
    try {
        if (j.contains("cluster_rate")) {
            SvModel m;
            m.label = j.value("label", std::string{});
            m.cluster_rate = j.at("cluster_rate").get<double>();
            m.ray_rate = j.at("ray_rate").get<double>();
            m.cluster_decay = j.at("cluster_decay").get<double>();
            m.ray_decay = j.at("ray_decay").get<double>();
            m.sigma_cluster = j.at("sigma_cluster").get<double>();
            m.sigma_ray = j.at("sigma_ray").get<double>();
            validate(m);
            return m;
        }
        ChannelModel m;
        m.label = j.value("label", std::string{});
        m.pl_d0 = j.at("pl_d0").get<double>();
        m.alpha = j.at("alpha").get<double>();
        m.sigma_pl = j.at("sigma_pl").get<double>();
        m.gamma_mean_ns = j.at("gamma_dist").at("mu").get<double>();
        m.gamma_std_ns = j.at("gamma_dist").at("sigma").get<double>();
        m.lambda1 = j.at("arrival").at("lambda1").get<double>();
        m.lambda2 = j.at("arrival").at("lambda2").get<double>();
        m.b = j.at("arrival").at("b").get<double>();
        m.lambda = j.value("lambda", 1.0 / (m.b / m.lambda1 + (1.0 - m.b) / m.lambda2));
        m.mean_rds_ns = j.value("mean_rds", 0.0);
        m.threshold_db = j.value("threshold_db", kDefaultThresholdDb);
        validate(m);
        return m;
    } catch (const json::exception& e) {
        throw Error(std::string("model json: ") + e.what());
    }
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string(), 0, e.what());
    }
}

AnyModel read_model_file(const std::filesystem::path& path) {
    return model_from_json(read_json_file(path));
}

} // namespace mmenc
