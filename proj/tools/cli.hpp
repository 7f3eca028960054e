#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace tqm::cli {

using json = nlohmann::json;

inline constexpr const char* artifact_version = "1.0.0";

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct Output {
    json parameters;  // effective values, defaults filled in
    json results;
    Table table;
};

const std::vector<std::string>& experiment_names();

// Runs one experiment. Unknown parameter keys raise ConfigError.
Output run_experiment(const std::string& name, const json& params, std::uint64_t seed);

// Required result keys and their JSON types ("number", "array", "string", "boolean").
const std::vector<std::pair<std::string, std::string>>& result_schema(const std::string& name);
// Empty when `results` satisfies the schema, else a description of the first violation.
std::string check_schema(const std::string& name, const json& results);

// Numbers with 17 significant digits; NaN and infinities become null.
std::string dump_json(const json& j, int indent = 2);
std::string render_json(const std::string& name, std::uint64_t seed, const Output& o, const std::string& timestamp);
std::string render_csv(const std::string& name, std::uint64_t seed, const Output& o, const std::string& timestamp);

// Full command line: returns the process exit code (0 ok, 2 config, 3 numerical validity).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tqm::cli
