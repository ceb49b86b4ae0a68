#include "scvi/serialization.hpp"

#include "scvi/error.hpp"

namespace scvi {

using nlohmann::json;

json vector_to_json(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vector vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r).transpose()));
  return rows;
}

Matrix matrix_from_json(const json& j) {
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return Matrix();
  const Index cols = static_cast<Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Vector row = vector_from_json(j.at(r));
    if (row.size() != cols) throw DimensionError("ragged matrix rows");
    m.row(r) = row.transpose();
  }
  return m;
}

json geometry_to_json(const BlockGeometry& g) {
  json set;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>)
          set = {{"kind", "box"}, {"lower", vector_to_json(s.lower)}, {"upper", vector_to_json(s.upper)}};
        else if constexpr (std::is_same_v<T, Ball>)
          set = {{"kind", "ball"}, {"center", vector_to_json(s.center)}, {"radius", s.radius}};
        else
          set = {{"kind", "simplex"}, {"dim", s.dim}};
      },
      g.set().kind());
  json j = {{"set", set}, {"dgf", g.dgf() == Dgf::Euclidean ? "euclidean" : "negative_entropy"}};
  if (g.dgf() == Dgf::NegativeEntropy) j["interior_floor"] = g.interior_floor();
  return j;
}

BlockGeometry geometry_from_json(const json& j) {
  const json& s = j.at("set");
  const std::string kind = s.at("kind").get<std::string>();
  const std::string dgf = j.value("dgf", "euclidean");
  if (dgf == "negative_entropy") {
    if (kind != "simplex") throw DomainError("entropy geometry requires a simplex set");
    return BlockGeometry::entropy(s.at("dim").get<Index>(), j.value("interior_floor", kEntropyFloor));
  }
  if (dgf != "euclidean") throw DomainError("unknown dgf '" + dgf + "'");
  if (kind == "box")
    return BlockGeometry::euclidean(
        ComponentSet::box(vector_from_json(s.at("lower")), vector_from_json(s.at("upper"))));
  if (kind == "ball")
    return BlockGeometry::euclidean(
        ComponentSet::ball(vector_from_json(s.at("center")), s.at("radius").get<double>()));
  if (kind == "simplex") return BlockGeometry::euclidean(ComponentSet::simplex(s.at("dim").get<Index>()));
  throw DomainError("unknown set kind '" + kind + "'");
}

json constants_to_json(const ProblemConstants& c) {
  json j = {{"bound", c.bound},
            {"map_bound", c.map_bound},
            {"lipschitz", c.lipschitz},
            {"noise", c.noise},
            {"noise_tilde", c.noise_tilde},
            {"global_lipschitz", c.global_lipschitz},
            {"method", c.method}};
  j["modulus"] = c.modulus ? json(*c.modulus) : json(nullptr);
  return j;
}

ProblemConstants constants_from_json(const json& j) {
  ProblemConstants c;
  c.bound = j.at("bound").get<std::vector<double>>();
  c.map_bound = j.at("map_bound").get<std::vector<double>>();
  c.lipschitz = j.at("lipschitz").get<std::vector<double>>();
  c.noise = j.at("noise").get<std::vector<double>>();
  c.noise_tilde = j.at("noise_tilde").get<std::vector<double>>();
  c.global_lipschitz = j.value("global_lipschitz", 0.0);
  c.method = j.value("method", "analytic");
  if (j.contains("modulus") && !j.at("modulus").is_null()) c.modulus = j.at("modulus").get<double>();
  return c;
}

json problem_to_json(const ScviProblem& problem) {
  json geoms = json::array();
  for (const auto& g : problem.geometries()) geoms.push_back(geometry_to_json(g));
  json j = {{"format", "scvi-problem"},
            {"version", 1},
            {"geometries", geoms},
            {"map", problem.map().to_json()},
            {"noise",
             {{"coord_std", problem.noise().coord_std},
              {"coord_std_tilde", problem.noise().coord_std_tilde}}},
            {"class",
             {{"kind", to_string(problem.monotonicity().kind)},
              {"modulus", problem.monotonicity().modulus}}},
            {"constants", constants_to_json(problem.constants())}};
  j["known_solution"] =
      problem.known_solution() ? vector_to_json(problem.known_solution()->values()) : json(nullptr);
  if (problem.objective()) {
    const auto& f = *problem.objective();
    j["objective"] = {{"hessian", matrix_to_json(f.hessian)},
                      {"linear", vector_to_json(f.linear)},
                      {"optimal_value", f.optimal_value}};
  } else {
    j["objective"] = nullptr;
  }
  if (problem.generator()) {
    const auto& g = *problem.generator();
    j["generator"] = {{"name", g.name}, {"params", g.params}, {"seed", g.seed}};
  } else {
    j["generator"] = nullptr;
  }
  return j;
}

ScviProblem problem_from_json(const json& j) {
  std::vector<BlockGeometry> geoms;
  for (const auto& g : j.at("geometries")) geoms.push_back(geometry_from_json(g));
  NoiseModel noise;
  noise.coord_std = j.at("noise").at("coord_std").get<std::vector<double>>();
  noise.coord_std_tilde = j.at("noise").value("coord_std_tilde", std::vector<double>{});
  MonotonicityClass cls{monotonicity_kind_from_string(j.at("class").at("kind").get<std::string>()),
                        j.at("class").value("modulus", 0.0)};
  ScviProblem problem(std::move(geoms), mapping_from_json(j.at("map")), std::move(noise), cls);
  problem.set_constants(constants_from_json(j.at("constants")));
  if (j.contains("known_solution") && !j.at("known_solution").is_null())
    problem.set_known_solution(problem.make_vector(vector_from_json(j.at("known_solution"))));
  if (j.contains("objective") && !j.at("objective").is_null()) {
    const json& f = j.at("objective");
    problem.set_objective({matrix_from_json(f.at("hessian")), vector_from_json(f.at("linear")),
                           f.at("optimal_value").get<double>()});
  }
  if (j.contains("generator") && !j.at("generator").is_null()) {
    const json& g = j.at("generator");
    problem.set_generator(
        {g.at("name").get<std::string>(), g.at("params"), g.at("seed").get<std::uint64_t>()});
  }
  return problem;
}

}  // namespace scvi
