#pragma once

// Cycle-level model of the hybrid datapath: input registers, residue lanes,
// an exponent pipeline delayed to retire alongside them, post stages
// (threshold detect, merge, output) and a stalling normalization engine.
//
// Timing and values are kept apart. scheduler_step moves op ids through the
// stages; simulate computes values with the hybrid operations and writes
// them back at retire.

#include "hrfna/hybrid.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hrfna {

struct PipelineConfig {
  int residue_stages = 5;
  int exponent_stages = 4;
  int norm_engine_stages = 3;
  int cycles_per_norm_stage = 2;
  int input_stages = 2;
  int post_stages = 3;
  int latency_target = 10;

  /// Exponent results are delayed by d = residue_stages - exponent_stages.
  int align_offset_d() const noexcept { return residue_stages - exponent_stages; }
  int normalization_latency() const noexcept { return norm_engine_stages * cycles_per_norm_stage; }
  int end_to_end() const noexcept { return input_stages + residue_stages + post_stages; }

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Throws InvariantViolation: stage-count (every depth >= 1, post_stages >= 2),
/// exponent-within-residue (d >= 0), latency-budget (input + residue + post
/// equals latency_target).
void validate(const PipelineConfig& cfg);

enum class FsmState : std::uint8_t { idle, execute, normalize, resume };

std::string to_string(FsmState s);

/// An op as seen by the timing model.
struct Slot {
  std::size_t op;
  std::uint32_t norm_events;
};

struct SimState {
  std::uint64_t cycle = 0;
  FsmState fsm = FsmState::idle;
  std::vector<std::optional<Slot>> input;
  std::vector<std::optional<Slot>> residue;
  /// Delay line of length d followed by the exponent stages.
  std::vector<std::optional<Slot>> exponent;
  std::vector<std::optional<Slot>> post;
  /// Normalization cycles still to run, including the current one.
  std::uint32_t norm_cycles_left = 0;
  /// Op detected at post stage 0 this cycle and waiting for the engine.
  std::optional<Slot> detected;
  /// Op under normalization.
  std::optional<Slot> normalizing;
  bool stall_asserted = false;
  /// Op that left the last post stage this cycle.
  std::optional<Slot> retired;

  static SimState initial(const PipelineConfig& cfg);
  bool pipeline_empty() const noexcept;
};

enum class UnitKind : std::uint8_t { lane, exponent, norm_engine, scheduler };
enum class Action : std::uint8_t { issue, advance, retire, stall, norm_begin, norm_end };

std::string to_string(Action a);

struct TraceEvent {
  std::uint64_t cycle;
  UnitKind unit;
  int lane = 0;
  Action action;
  std::optional<std::size_t> op;
  std::string value_hex;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// "lane<i>", "exponent", "norm-engine" or "scheduler".
std::string unit_name(const TraceEvent& e);

/// Sort key: cycle, then unit index (lanes, exponent, norm engine, scheduler).
bool trace_before(const TraceEvent& a, const TraceEvent& b);

/// True when the cycle after `state` accepts an issue, i.e. it will not be a
/// Normalize cycle.
bool accepts_issue(const SimState& state);

/// Advances one cycle. `issue` enters input stage 0 and must only be given
/// when accepts_issue(state). Events for the new cycle are appended to
/// `trace` (lanes are emitted for `lanes` residue channels) without values.
SimState scheduler_step(const SimState& state, const PipelineConfig& cfg,
                        std::optional<Slot> issue = std::nullopt,
                        std::vector<TraceEvent>* trace = nullptr, std::size_t lanes = 0);

enum class OpKind : std::uint8_t { mul, add };

struct ProgramOp {
  OpKind kind;
  std::string a;
  std::string b;
  std::string result;
};

struct Program {
  std::vector<std::pair<std::string, HybridNum>> literals;
  std::vector<ProgramOp> ops;
};

/// Throws InvalidProgram for an empty op list, a name defined twice or an
/// operand read before it is defined.
void check_program(const Program& program);

/// Cycles on which the ingress stream deasserts valid; nothing issues then.
struct Stimulus {
  std::set<std::uint64_t> tvalid_low;
};

struct Metrics {
  std::uint64_t ops = 0;
  std::uint64_t latency_p50 = 0;
  std::uint64_t latency_max = 0;
  double achieved_ii = 0.0;
  std::uint64_t stall_cycles = 0;
  std::uint64_t norm_events = 0;
  double stall_fraction = 0.0;
  std::map<std::uint64_t, std::uint64_t> latency_histogram;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct SimResult {
  std::vector<HybridNum> results;
  std::vector<OpOutcome> outcomes;
  std::vector<TraceEvent> trace;
  Metrics metrics;
};

/// Runs the program to completion. Issue is in order, one op per cycle at
/// most, and an op waits until its operands have retired. Throws
/// InvalidProgram for an empty program, duplicate names or undefined
/// operands.
SimResult simulate(const Program& program, const PipelineConfig& cfg, const HybridConfig& hcfg,
                   const ModulusSet& ms, const Stimulus& stimulus = {});

/// Latency is retire - issue + 1 per op; achieved II is
/// (last issue - first issue + 1) / ops; stall fraction is stall cycles over
/// the cycles from first issue to last retire. Throws IncompleteTrace when an
/// issue lacks a retire.
Metrics metrics_report(const std::vector<TraceEvent>& trace);

}  // namespace hrfna
