#include "hrfna/pipeline.hpp"

#include "hrfna/error.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace hrfna {

void validate(const PipelineConfig& cfg) {
  for (int depth : {cfg.residue_stages, cfg.exponent_stages, cfg.norm_engine_stages,
                    cfg.cycles_per_norm_stage, cfg.input_stages})
    if (depth < 1) throw InvariantViolation("stage-count", "every stage count must be at least 1");
  // Threshold detect and the output register need separate post stages.
  if (cfg.post_stages < 2) throw InvariantViolation("stage-count", "post_stages must be at least 2");
  if (cfg.align_offset_d() < 0)
    throw InvariantViolation("exponent-within-residue",
                             "exponent pipeline may not be deeper than the residue lanes");
  if (cfg.end_to_end() != cfg.latency_target)
    throw InvariantViolation("latency-budget",
                             "input + residue + post stages must equal latency_target");
}

std::string to_string(FsmState s) {
  switch (s) {
    case FsmState::idle: return "Idle";
    case FsmState::execute: return "Execute";
    case FsmState::normalize: return "Normalize";
    case FsmState::resume: return "Resume";
  }
  return "?";
}

std::string to_string(Action a) {
  switch (a) {
    case Action::issue: return "issue";
    case Action::advance: return "advance";
    case Action::retire: return "retire";
    case Action::stall: return "stall";
    case Action::norm_begin: return "norm-begin";
    case Action::norm_end: return "norm-end";
  }
  return "?";
}

std::string unit_name(const TraceEvent& e) {
  switch (e.unit) {
    case UnitKind::lane: return "lane" + std::to_string(e.lane);
    case UnitKind::exponent: return "exponent";
    case UnitKind::norm_engine: return "norm-engine";
    case UnitKind::scheduler: return "scheduler";
  }
  return "?";
}

bool trace_before(const TraceEvent& a, const TraceEvent& b) {
  if (a.cycle != b.cycle) return a.cycle < b.cycle;
  if (a.unit != b.unit) return a.unit < b.unit;
  return a.lane < b.lane;
}

SimState SimState::initial(const PipelineConfig& cfg) {
  validate(cfg);
  SimState s;
  s.input.resize(static_cast<std::size_t>(cfg.input_stages));
  s.residue.resize(static_cast<std::size_t>(cfg.residue_stages));
  s.exponent.resize(static_cast<std::size_t>(cfg.align_offset_d() + cfg.exponent_stages));
  s.post.resize(static_cast<std::size_t>(cfg.post_stages));
  return s;
}

bool SimState::pipeline_empty() const noexcept {
  const auto empty = [](const std::vector<std::optional<Slot>>& v) {
    return std::none_of(v.begin(), v.end(), [](const auto& x) { return x.has_value(); });
  };
  return empty(input) && empty(residue) && empty(exponent) && empty(post) && !detected &&
         !normalizing;
}

bool accepts_issue(const SimState& state) {
  if (state.detected) return false;
  return !(state.fsm == FsmState::normalize && state.norm_cycles_left > 1);
}

namespace {

// Shifts one position down the register chain and returns what fell off.
std::optional<Slot> shift(std::vector<std::optional<Slot>>& stages, std::optional<Slot> in) {
  std::optional<Slot> out = stages.back();
  for (std::size_t i = stages.size() - 1; i > 0; --i) stages[i] = stages[i - 1];
  stages[0] = in;
  return out;
}

void emit(std::vector<TraceEvent>* trace, std::uint64_t cycle, UnitKind unit, int lane,
          Action action, std::optional<std::size_t> op) {
  if (trace) trace->push_back(TraceEvent{cycle, unit, lane, action, op, {}});
}

}  // namespace

SimState scheduler_step(const SimState& state, const PipelineConfig& cfg, std::optional<Slot> issue,
                        std::vector<TraceEvent>* trace, std::size_t lanes) {
  SimState s = state;
  s.cycle = state.cycle + 1;
  s.retired.reset();
  const std::uint64_t t = s.cycle;
  const auto norm_latency = static_cast<std::uint32_t>(cfg.normalization_latency());

  bool norm_finished = false;
  if (state.fsm == FsmState::normalize && state.norm_cycles_left > 1) {
    s.fsm = FsmState::normalize;
    --s.norm_cycles_left;
  } else if (state.fsm == FsmState::normalize) {
    s.fsm = FsmState::resume;
    s.norm_cycles_left = 0;
    norm_finished = true;
  } else if (state.detected) {
    s.fsm = FsmState::normalize;
    s.normalizing = state.detected;
    s.detected.reset();
    s.norm_cycles_left = norm_latency * state.detected->norm_events;
  } else if (state.fsm == FsmState::resume || issue || !state.pipeline_empty()) {
    s.fsm = FsmState::execute;
  } else {
    s.fsm = FsmState::idle;
  }
  s.stall_asserted = s.fsm == FsmState::normalize;

  if (s.stall_asserted) {
    if (issue) throw InternalError("issue offered during a Normalize cycle");
    const Slot op = *s.normalizing;
    const std::uint32_t elapsed = norm_latency * op.norm_events - s.norm_cycles_left;
    if (elapsed % norm_latency == 0) {
      if (elapsed > 0) emit(trace, t, UnitKind::norm_engine, 0, Action::norm_end, op.op);
      emit(trace, t, UnitKind::norm_engine, 0, Action::norm_begin, op.op);
    }
    emit(trace, t, UnitKind::norm_engine, 0, Action::advance, op.op);
    emit(trace, t, UnitKind::scheduler, 0, Action::stall, std::nullopt);
    return s;
  }

  if (norm_finished) {
    emit(trace, t, UnitKind::norm_engine, 0, Action::norm_end, s.normalizing->op);
    s.normalizing.reset();
  }

  // Everything advances one stage. The exponent chain has the same length as
  // the residue lanes (delay line of d plus its own stages), so both hand the
  // same op to the post stages.
  const std::optional<Slot> from_input = shift(s.input, issue);
  const std::optional<Slot> from_residue = shift(s.residue, from_input);
  const std::optional<Slot> from_exponent = shift(s.exponent, from_input);
  if (from_residue.has_value() != from_exponent.has_value() ||
      (from_residue && from_residue->op != from_exponent->op))
    throw InternalError("residue and exponent paths out of alignment");
  shift(s.post, from_residue);

  if (s.fsm != FsmState::idle) emit(trace, t, UnitKind::scheduler, 0, Action::advance, std::nullopt);
  if (issue) emit(trace, t, UnitKind::scheduler, 0, Action::issue, issue->op);

  for (std::size_t j = 0; j < s.residue.size(); ++j) {
    if (!s.residue[j]) continue;
    const Action a = j + 1 == s.residue.size() ? Action::retire : Action::advance;
    for (std::size_t lane = 0; lane < lanes; ++lane)
      emit(trace, t, UnitKind::lane, static_cast<int>(lane), a, s.residue[j]->op);
  }
  const auto d = static_cast<std::size_t>(cfg.align_offset_d());
  for (std::size_t j = d; j < s.exponent.size(); ++j) {
    if (!s.exponent[j]) continue;
    const Action a = j + 1 == s.exponent.size() ? Action::retire : Action::advance;
    emit(trace, t, UnitKind::exponent, 0, a, s.exponent[j]->op);
  }

  if (s.post.front() && s.post.front()->norm_events > 0) s.detected = s.post.front();
  if (s.post.back()) {
    s.retired = s.post.back();
    emit(trace, t, UnitKind::scheduler, 0, Action::retire, s.retired->op);
    s.post.back().reset();
  }
  return s;
}

namespace {

std::string residue_hex(std::uint32_t r, std::uint32_t modulus) {
  std::size_t width = 0;
  for (std::uint64_t span = 1; span < modulus; span <<= 4) ++width;
  std::string digits = to_hex(BigInt(r));
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return digits;
}

// Pre-normalization result as the lanes and exponent unit see it.
struct OpView {
  ResidueVector raw_residues;
  std::int64_t raw_exponent;
};

}  // namespace

void check_program(const Program& program) {
  if (program.ops.empty()) throw InvalidProgram("program has no operations");
  std::unordered_set<std::string> defined;
  for (const auto& [name, value] : program.literals)
    if (!defined.insert(name).second) throw InvalidProgram("name defined twice: " + name);
  for (std::size_t i = 0; i < program.ops.size(); ++i) {
    const ProgramOp& op = program.ops[i];
    for (const std::string* operand : {&op.a, &op.b})
      if (!defined.contains(*operand))
        throw InvalidProgram("op " + std::to_string(i) + " reads undefined operand " + *operand);
    if (!defined.insert(op.result).second) throw InvalidProgram("name defined twice: " + op.result);
  }
}

SimResult simulate(const Program& program, const PipelineConfig& cfg, const HybridConfig& hcfg,
                   const ModulusSet& ms, const Stimulus& stimulus) {
  validate(cfg);
  validate(hcfg, ms);
  check_program(program);

  const std::size_t n = program.ops.size();
  std::unordered_map<std::string, HybridNum> regs;
  for (const auto& [name, value] : program.literals) {
    if (!(value.set() == ms)) throw MismatchedSet();
    regs.emplace(name, value);
  }

  SimResult out;
  std::vector<std::optional<OpOutcome>> outcomes(n);
  SimState state = SimState::initial(cfg);
  std::size_t next = 0;
  std::size_t retired = 0;
  // Every op needs at most latency + stall cycles after its operands retire.
  std::uint64_t budget = 0;

  while (retired < n) {
    const std::uint64_t t = state.cycle + 1;
    std::optional<Slot> issue;
    if (next < n && accepts_issue(state) && !stimulus.tvalid_low.contains(t)) {
      const ProgramOp& op = program.ops[next];
      const auto a = regs.find(op.a);
      const auto b = regs.find(op.b);
      if (a != regs.end() && b != regs.end()) {
        OpOutcome r = op.kind == OpKind::mul ? hrfna_mul_traced(a->second, b->second, ms, hcfg)
                                             : hrfna_add_traced(a->second, b->second, ms, hcfg);
        issue = Slot{next, static_cast<std::uint32_t>(r.events.size())};
        budget += static_cast<std::uint64_t>(cfg.end_to_end()) +
                  static_cast<std::uint64_t>(cfg.normalization_latency()) * r.events.size() + 1;
        outcomes[next] = std::move(r);
        ++next;
      }
    }
    state = scheduler_step(state, cfg, issue, &out.trace, ms.size());
    if (state.retired) {
      const std::size_t id = state.retired->op;
      regs.insert_or_assign(program.ops[id].result, outcomes[id]->value);
      ++retired;
    }
    if (state.cycle > budget + stimulus.tvalid_low.size() + 1)
      throw InternalError("simulation made no progress");
  }

  std::vector<OpView> views;
  views.reserve(n);
  for (const auto& o : outcomes) {
    if (o->events.empty())
      views.push_back({o->value.mantissa(), o->value.exponent()});
    else
      views.push_back({encode_signed(o->events.front().input, ms), o->events.front().exponent_before});
  }
  std::vector<std::size_t> norm_seen(n, 0);
  for (TraceEvent& e : out.trace) {
    if (!e.op) continue;
    const std::size_t id = *e.op;
    const OpOutcome& o = *outcomes[id];
    switch (e.unit) {
      case UnitKind::lane: {
        const auto lane = static_cast<std::size_t>(e.lane);
        e.value_hex = residue_hex(views[id].raw_residues[lane], ms.modulus(lane));
        break;
      }
      case UnitKind::exponent:
        e.value_hex = to_hex(BigInt(views[id].raw_exponent));
        break;
      case UnitKind::norm_engine:
        if (e.action == Action::norm_begin) {
          e.value_hex = to_hex(o.events[norm_seen[id]].input);
        } else if (e.action == Action::norm_end) {
          e.value_hex = to_hex(o.events[norm_seen[id]].output);
          ++norm_seen[id];
        }
        break;
      case UnitKind::scheduler:
        if (e.action == Action::retire) e.value_hex = to_hex(signed_value(o.value.mantissa(), ms));
        break;
    }
  }
  std::stable_sort(out.trace.begin(), out.trace.end(), trace_before);

  out.results.reserve(n);
  out.outcomes.reserve(n);
  for (auto& o : outcomes) {
    out.results.push_back(o->value);
    out.outcomes.push_back(std::move(*o));
  }
  out.metrics = metrics_report(out.trace);
  return out;
}

Metrics metrics_report(const std::vector<TraceEvent>& trace) {
  std::map<std::size_t, std::uint64_t> issued, retired;
  Metrics m;
  for (const TraceEvent& e : trace) {
    if (e.unit == UnitKind::norm_engine && e.action == Action::norm_begin) ++m.norm_events;
    if (e.unit != UnitKind::scheduler) continue;
    if (e.action == Action::stall) ++m.stall_cycles;
    if (!e.op) continue;
    if (e.action == Action::issue && !issued.emplace(*e.op, e.cycle).second)
      throw IncompleteTrace("op " + std::to_string(*e.op) + " issued twice");
    if (e.action == Action::retire && !retired.emplace(*e.op, e.cycle).second)
      throw IncompleteTrace("op " + std::to_string(*e.op) + " retired twice");
  }
  for (const auto& [op, cycle] : issued)
    if (!retired.contains(op)) throw IncompleteTrace("op " + std::to_string(op) + " never retires");
  for (const auto& [op, cycle] : retired)
    if (!issued.contains(op)) throw IncompleteTrace("op " + std::to_string(op) + " retires unissued");
  if (issued.empty()) return m;

  std::vector<std::uint64_t> latencies;
  std::uint64_t first_issue = UINT64_MAX, last_issue = 0, last_retire = 0;
  for (const auto& [op, cycle] : issued) {
    const std::uint64_t r = retired.at(op);
    if (r < cycle) throw IncompleteTrace("op " + std::to_string(op) + " retires before issue");
    latencies.push_back(r - cycle + 1);
    first_issue = std::min(first_issue, cycle);
    last_issue = std::max(last_issue, cycle);
    last_retire = std::max(last_retire, r);
  }
  std::sort(latencies.begin(), latencies.end());
  m.ops = latencies.size();
  m.latency_p50 = latencies[(latencies.size() + 1) / 2 - 1];
  m.latency_max = latencies.back();
  for (std::uint64_t l : latencies) ++m.latency_histogram[l];
  m.achieved_ii = static_cast<double>(last_issue - first_issue + 1) / static_cast<double>(m.ops);
  m.stall_fraction =
      static_cast<double>(m.stall_cycles) / static_cast<double>(last_retire - first_issue + 1);
  return m;
}

}  // namespace hrfna
