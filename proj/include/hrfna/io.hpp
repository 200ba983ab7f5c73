#pragma once

// Text formats and configuration. Every format starts with a version line or
// carries a versioned "format" key.

#include "hrfna/hybrid.hpp"
#include "hrfna/pipeline.hpp"
#include "hrfna/workloads.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace hrfna {

struct Config {
  ModulusSet moduli = ModulusSet::default_set();
  HybridConfig hybrid;
  PipelineConfig pipeline;

  friend bool operator==(const Config&, const Config&) = default;
};

/// Parses and validates a config JSON document. Missing keys take defaults.
/// Throws ParseError on malformed input and InvariantViolation naming the
/// failed invariant (pairwise-coprime, modulus-min, modulus-max, plus the
/// hybrid and pipeline invariants).
Config parse_config(std::string_view json);
std::string format_config(const Config& cfg);

/// Defaults when `path` is empty; otherwise reads the file (IoError if it
/// cannot be read).
Config load_config(const std::optional<std::filesystem::path>& path);

/// Path named by HRFNA_CONFIG, if set and nonempty.
std::optional<std::filesystem::path> config_path_from_env();

void save_config(const std::filesystem::path& path, const Config& cfg);

/// `hrfna-num/1 res=<hex>,<hex>,... exp=<decimal>`, residues zero-padded to
/// ceil(log16 m_i) digits.
std::string format_record(const HybridNum& h);
HybridNum parse_record(std::string_view text, const ModulusSet& ms);

/// Program text: header `hrfna-program 1`, then one statement per line:
/// `lit <name> <real | record>`, `mul <a> <b> [name]`, `add <a> <b> [name]`.
/// Unnamed results are called r<i> for the i-th mul/add. `#` starts a
/// comment. Throws ParseError; undefined names are left to simulate.
Program parse_program(std::string_view text, const ModulusSet& ms, const HybridConfig& cfg);
std::string format_program(const Program& program);

/// `# hrfna-trace v1` then `cycle,unit,action,op_id,value_hex` rows.
std::string format_trace_csv(const std::vector<TraceEvent>& trace);

std::string format_metrics_json(const Metrics& m);
std::string format_report_json(const DriftReport& r);

/// One line per op with both operands, the expected result and its
/// normalization count, from direct evaluation of the program.
std::string format_vectors(const Program& program, const ModulusSet& ms, const HybridConfig& cfg);

std::string read_file(const std::filesystem::path& path);

/// Writes to a temporary file next to `path`, then renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace hrfna
