#pragma once

#include <json.hpp>

#include "semiabelic/models.hpp"

namespace semiabelic::io {

using json = nlohmann::json;

json matrix_to_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd matrix_from_json(const json& j);

json vector_to_json(const Eigen::VectorXcd& v);
Eigen::VectorXcd vector_from_json(const json& j);

json characteristic_to_json(const Characteristic& ch);
Characteristic characteristic_from_json(const json& j);

json model_to_json(const models::DegenerationModel& m, std::uint64_t seed);
models::DegenerationModel model_from_json(const json& j);

json report_to_json(const models::VerificationReport& r);

/// Deterministic serialization: fixed key order, shortest round-trip doubles.
std::string dump_deterministic(const json& j);

}  // namespace semiabelic::io
