#pragma once

#include <nlohmann/json.hpp>

#include "scvi/problem.hpp"

namespace scvi {

nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Matrix& m);  // row-major nested arrays
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json geometry_to_json(const BlockGeometry& g);
BlockGeometry geometry_from_json(const nlohmann::json& j);
nlohmann::json constants_to_json(const ProblemConstants& c);
ProblemConstants constants_from_json(const nlohmann::json& j);

nlohmann::json problem_to_json(const ScviProblem& problem);
ScviProblem problem_from_json(const nlohmann::json& j);

}  // namespace scvi
