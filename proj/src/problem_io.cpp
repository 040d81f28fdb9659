#include "ghnn/problem_io.hpp"

#include <fstream>
#include <vector>

#include "ghnn/errors.hpp"

namespace ghnn {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd vector_field(const nlohmann::json& j, const char* key, Eigen::Index expected) {
  const auto values = j.at(key).get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != expected) {
    throw DimensionError(std::string("problem field '") + key + "' has the wrong length");
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), expected);
}

}  // namespace

nlohmann::json problem_to_json(const InverseProblemd& problem) {
  nlohmann::json j;
  j["m"] = problem.rows();
  j["n"] = problem.cols();
  std::vector<double> k;
  k.reserve(static_cast<std::size_t>(problem.K.size()));
  for (Eigen::Index i = 0; i < problem.rows(); ++i) {
    for (Eigen::Index c = 0; c < problem.cols(); ++c) k.push_back(problem.K(i, c));
  }
  j["K"] = std::move(k);
  j["g"] = to_std(problem.g);
  if (problem.f_exact) j["f_exact"] = to_std(*problem.f_exact);
  if (problem.grid) j["grid"] = to_std(*problem.grid);
  return j;
}

InverseProblemd problem_from_json(const nlohmann::json& j) {
  try {
    const auto m = j.at("m").get<Eigen::Index>();
    const auto n = j.at("n").get<Eigen::Index>();
    if (m < 1 || n < 1) throw DimensionError("problem needs m >= 1 and n >= 1");
    const auto k = j.at("K").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(k.size()) != m * n) throw DimensionError("K must hold m*n entries");

    InverseProblemd p;
    p.K = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(k.data(), m, n);
    p.g = vector_field(j, "g", m);
    if (j.contains("f_exact")) p.f_exact = vector_field(j, "f_exact", n);
    if (j.contains("grid")) p.grid = vector_field(j, "grid", n);
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed problem JSON: ") + e.what());
  }
}

void save_problem(const InverseProblemd& problem, const std::filesystem::path& file) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + file.string() + " for writing");
  os << problem_to_json(problem).dump(2) << '\n';
  if (!os) throw IoError("write failed for " + file.string());
}

InverseProblemd load_problem(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw IoError("cannot open " + file.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(file.string() + ": " + e.what());
  }
  return problem_from_json(j);
}

}  // namespace ghnn
