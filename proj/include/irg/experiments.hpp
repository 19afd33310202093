// Batch experiments behind the command-line tool: a small self-describing
// table type with CSV / JSON writers, a strict experiment-config parser,
// and the named experiment drivers.
#ifndef IRG_EXPERIMENTS_HPP
#define IRG_EXPERIMENTS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace irg {

// A rendered result table.  Cells are pre-formatted strings: integers in
// decimal, floating-point values with 17 significant digits so a reload is
// bit-faithful, empty string for not-applicable.  `params` carries the
// self-description (model parameters, seed, code version, totals); writers
// emit it alongside the data so every output file stands alone.
struct Table {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::int64_t failed_replicas = 0;  // also recorded in params
};

// Cell renderers.
std::string cell(double value);         // %.17g
std::string cell(std::int64_t value);   // decimal
std::string cell(std::uint64_t value);  // decimal

// RFC-4180 output: CRLF line endings, cells quoted (with doubled quotes)
// when they contain a comma, quote, or line break.  The header row names
// every column; `params` keys are appended as constant trailing columns so
// an empty table still records its provenance.
void write_csv(std::ostream& out, const Table& table);

// JSON object {experiment, parameters, columns, rows} with insertion order
// preserved; cells stay strings, exactly as in the CSV.
void write_json(std::ostream& out, const Table& table);

// Parsed experiment configuration (strict: unknown keys anywhere in the
// document are rejected, as are missing sections and type mismatches).
//
//   {
//     "model":      {"gamma": 0.25, "beta": 0.1},
//     "experiment": {"name": "largest-component-exponent", ...parameters},
//     "seeds":      {"master_seed": 1},
//     "output":     {"format": "csv", "path": "out.csv"}   // optional
//   }
//
// Experiment parameters all have defaults; see the per-experiment allowed
// keys in the implementation.
struct ExperimentConfig {
  double gamma = 0.0;
  double beta = 0.0;
  std::string name;
  nlohmann::json params;  // experiment-specific section minus "name"
  std::uint64_t master_seed = 0;
  std::string format = "csv";  // "csv" or "json"
  std::string path;            // empty means standard output
};

// Parses and validates a configuration document.  Throws UsageError with
// the offending key path on any schema violation.
ExperimentConfig parse_experiment_config(const std::string& text);

// The recognized experiment names, in canonical order.
const std::vector<std::string>& experiment_names();

// Runs one named experiment.  Replica-level failures are recorded in the
// table (per-row failure counts and a params total), never silently
// dropped; an unknown name throws UsageError.
Table run_experiment(const ExperimentConfig& config, int workers);

}  // namespace irg

#endif  // IRG_EXPERIMENTS_HPP
