#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "omg/sim.hpp"

namespace omg {

// Key-order-preserving JSON so emitted documents are byte-stable.
using Json = nlohmann::ordered_json;

// Strict parsing: unknown keys anywhere raise Errc::config_error; malformed
// JSON raises Errc::parse_error.
SimConfig config_from_json(const Json& j);
SimConfig load_config_file(const std::string& path);

Json omg_params_to_json(const OmgParams& params);
Json result_to_json(const SimResult& result, const Comparison& comparison);

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryPoint>& trajectory);
// Policy labels contain brackets; map them to safe file stems.
std::string sanitize_filename(const std::string& name);

}  // namespace omg
