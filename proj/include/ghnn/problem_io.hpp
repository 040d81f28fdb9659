#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "ghnn/hopfield.hpp"

namespace ghnn {

/// {m, n, K (row-major), g, f_exact?, grid?}
nlohmann::json problem_to_json(const InverseProblemd& problem);
InverseProblemd problem_from_json(const nlohmann::json& j);

void save_problem(const InverseProblemd& problem, const std::filesystem::path& file);
InverseProblemd load_problem(const std::filesystem::path& file);

}  // namespace ghnn
