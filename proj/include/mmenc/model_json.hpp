#pragma once

#include "mmenc/synthesis.hpp"

#include <json.hpp>

#include <filesystem>

namespace mmenc {

// ChannelModel:
//   {"label", "pl_d0", "alpha", "sigma_pl", "gamma_dist": {"mu", "sigma"},
//    "lambda", "arrival": {"lambda1", "lambda2", "b"}, "mean_rds", "threshold_db"}
// SvModel:
//   {"label", "cluster_rate", "ray_rate", "cluster_decay", "ray_decay",
//    "sigma_cluster", "sigma_ray"}
// Units follow the structs: ns and 1/ns, dB.

nlohmann::ordered_json to_json(const ChannelModel& m);
nlohmann::ordered_json to_json(const SvModel& m);
nlohmann::ordered_json to_json(const AnyModel& m);

/// Dispatches on the presence of "cluster_rate". Validates the result.
AnyModel model_from_json(const nlohmann::json& j);

AnyModel read_model_file(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);

} // namespace mmenc
