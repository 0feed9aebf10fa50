#pragma once

// Declarative experiments: JSON config in, JSON-lines records (and a CSV
// table for scans) out.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "danilab/curve.hpp"
#include "danilab/dirichlet.hpp"
#include "danilab/exact.hpp"
#include "danilab/stats.hpp"

namespace danilab {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int validation = 2;
inline constexpr int runtime = 3;
inline constexpr int assertion = 4;
}  // namespace exit_code

enum class Subcommand {
  genericity,
  dirichlet_scan,
  correspondence,
  equidist,
  nondiv,
  rep_verify,
  w_invariance,
};

std::string to_string(Subcommand sub);
// ValidationError on an unknown name.
Subcommand parse_subcommand(std::string_view name);
const std::vector<std::string>& subcommand_names();

struct CurveSpec {
  int degree = 0;
  std::vector<RationalMatrix> coeffs;
  Rational a;
  Rational b;

  MatrixPolyCurve to_curve() const;
  RationalPolyCurve to_exact() const;
  bool operator==(const CurveSpec&) const = default;
};

struct ExperimentConfig {
  std::string experiment_id;
  Subcommand subcommand = Subcommand::genericity;
  int n = 1;
  CurveSpec curve;
  // Validated, with every default filled in.
  nlohmann::json parameters;
  Sampler sampler;
  std::string output;

  bool operator==(const ExperimentConfig& other) const;
};

// ParseError (with 1-based line and column) on malformed JSON;
// ValidationError naming the offending field otherwise.
ExperimentConfig parse_config(std::string_view text);

// Canonical form: sorted keys, defaults explicit, no whitespace.
std::string serialize(const ExperimentConfig& config);
// FNV-1a 64 of the canonical form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

struct RunRecord {
  std::string experiment_id;
  std::string module;
  std::string op;
  // Operation-specific fields, in output order.
  nlohmann::ordered_json fields;
  std::string config_hash;
  std::string status = "ok";
  std::string timestamp;

  nlohmann::ordered_json to_json() const;
  // The JSON line with the timestamp removed.
  std::string payload() const;
};

struct RunResult {
  std::vector<RunRecord> records;
  std::optional<ScanTable> table;
};

// Dispatches to the module operations; writes nothing.
RunResult execute(const ExperimentConfig& config, int threads = 1);
// Writes <output>.jsonl and, for scans, <output>.csv.
void write_outputs(const ExperimentConfig& config, const RunResult& result);
// execute followed by write_outputs.
std::vector<RunRecord> run(const ExperimentConfig& config, int threads = 1);

std::string to_jsonl(const std::vector<RunRecord>& records);

struct AssertionReport {
  bool passed = true;
  std::vector<std::string> failures;
};

// Baseline: {"checks": [{"match": {...}, "field": f, "expected": x,
// "abs_tol": e} | {"match": {...}, "field": f, "equals": v}]}.  Every check
// must select at least one record.
AssertionReport check_baseline(const nlohmann::json& baseline, const std::vector<RunRecord>& records);

}  // namespace danilab
