#include "hrfna/io.hpp"

#include "hrfna/error.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unistd.h>

namespace hrfna {

using nlohmann::json;

namespace {

constexpr std::string_view kConfigFormat = "hrfna-config/1";
constexpr std::string_view kRecordTag = "hrfna-num/1";
constexpr std::string_view kProgramHeader = "hrfna-program 1";

std::size_t hex_width(std::uint32_t modulus) {
  std::size_t width = 0;
  for (std::uint64_t span = 1; span < modulus; span <<= 4) ++width;
  return width;
}

std::string padded_hex(std::uint32_t r, std::uint32_t modulus) {
  std::string digits = to_hex(BigInt(r));
  const std::size_t width = hex_width(modulus);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return digits;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <class T>
T parse_int(std::string_view s, int base, const char* what) {
  T v{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty())
    throw ParseError(std::string("bad ") + what + ": '" + std::string(s) + "'");
  return v;
}

std::optional<double> parse_real(std::string_view s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

bool valid_name(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

std::string residue_fields(const ResidueVector& rv, char sep) {
  std::string out;
  for (std::size_t i = 0; i < rv.size(); ++i) {
    if (i) out.push_back(sep);
    out += padded_hex(rv[i], rv.set().modulus(i));
  }
  return out;
}

json hybrid_json(const ModulusSet& ms, const HybridConfig& h) {
  return json{{"moduli", std::vector<std::uint32_t>(ms.moduli().begin(), ms.moduli().end())},
              {"alpha_num", h.alpha.num},
              {"alpha_den", h.alpha.den},
              {"k", h.scale_shift_k},
              {"b", h.operand_bound_bits},
              {"audit", h.audit}};
}

ModulusSet checked_moduli(std::vector<std::uint32_t> moduli) {
  try {
    return ModulusSet(std::move(moduli));
  } catch (const NotCoprime& e) {
    throw InvariantViolation("pairwise-coprime", e.what());
  } catch (const ModulusTooSmall& e) {
    throw InvariantViolation("modulus-min", e.what());
  } catch (const OutOfRange& e) {
    throw InvariantViolation("modulus-max", e.what());
  }
}

template <class T>
void read_key(const json& doc, const char* key, T& out) {
  const auto it = doc.find(key);
  if (it == doc.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

Config parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("config must be a JSON object");
  static const std::set<std::string> known = {
      "format",      "moduli",          "alpha_num",          "alpha_den",
      "k",           "b",               "audit",              "residue_stages",
      "exponent_stages", "norm_engine_stages", "cycles_per_norm_stage", "input_stages",
      "post_stages", "latency_target", "align_offset_d"};
  for (const auto& [key, value] : doc.items())
    if (!known.contains(key)) throw ParseError("unknown config key '" + key + "'");
  if (doc.contains("format") && doc["format"] != kConfigFormat)
    throw ParseError("unsupported config format " + doc["format"].dump());

  Config cfg;
  std::vector<std::uint32_t> moduli(cfg.moduli.moduli().begin(), cfg.moduli.moduli().end());
  std::vector<std::int64_t> raw_moduli(moduli.begin(), moduli.end());
  read_key(doc, "moduli", raw_moduli);
  moduli.clear();
  for (std::int64_t m : raw_moduli) {
    if (m < 0 || m > UINT32_MAX) throw InvariantViolation("modulus-max", "modulus out of range");
    moduli.push_back(static_cast<std::uint32_t>(m));
  }
  cfg.moduli = checked_moduli(std::move(moduli));

  read_key(doc, "alpha_num", cfg.hybrid.alpha.num);
  read_key(doc, "alpha_den", cfg.hybrid.alpha.den);
  read_key(doc, "k", cfg.hybrid.scale_shift_k);
  read_key(doc, "b", cfg.hybrid.operand_bound_bits);
  read_key(doc, "audit", cfg.hybrid.audit);
  PipelineConfig& p = cfg.pipeline;
  read_key(doc, "residue_stages", p.residue_stages);
  read_key(doc, "exponent_stages", p.exponent_stages);
  read_key(doc, "norm_engine_stages", p.norm_engine_stages);
  read_key(doc, "cycles_per_norm_stage", p.cycles_per_norm_stage);
  read_key(doc, "input_stages", p.input_stages);
  read_key(doc, "post_stages", p.post_stages);
  read_key(doc, "latency_target", p.latency_target);
  // align_offset_d is derived from the stage counts; a stored value is ignored.

  validate(cfg.hybrid, cfg.moduli);
  validate(cfg.pipeline);
  return cfg;
}

std::string format_config(const Config& cfg) {
  json doc = hybrid_json(cfg.moduli, cfg.hybrid);
  doc["format"] = kConfigFormat;
  const PipelineConfig& p = cfg.pipeline;
  doc["residue_stages"] = p.residue_stages;
  doc["exponent_stages"] = p.exponent_stages;
  doc["norm_engine_stages"] = p.norm_engine_stages;
  doc["cycles_per_norm_stage"] = p.cycles_per_norm_stage;
  doc["input_stages"] = p.input_stages;
  doc["post_stages"] = p.post_stages;
  doc["latency_target"] = p.latency_target;
  doc["align_offset_d"] = p.align_offset_d();
  return doc.dump(2) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Config load_config(const std::optional<std::filesystem::path>& path) {
  if (!path) {
    Config cfg;
    validate(cfg.hybrid, cfg.moduli);
    validate(cfg.pipeline);
    return cfg;
  }
  return parse_config(read_file(*path));
}

std::optional<std::filesystem::path> config_path_from_env() {
  const char* v = std::getenv("HRFNA_CONFIG");
  if (!v || !*v) return std::nullopt;
  return std::filesystem::path(v);
}

void save_config(const std::filesystem::path& path, const Config& cfg) {
  write_atomic(path, format_config(cfg));
}

std::string format_record(const HybridNum& h) {
  return std::string(kRecordTag) + " res=" + residue_fields(h.mantissa(), ',') +
         " exp=" + std::to_string(h.exponent());
}

HybridNum parse_record(std::string_view text, const ModulusSet& ms) {
  const auto t = tokens(text);
  if (t.size() != 3 || t[0] != kRecordTag || !t[1].starts_with("res=") || !t[2].starts_with("exp="))
    throw ParseError("expected '" + std::string(kRecordTag) + " res=... exp=...'");
  const auto fields = split(t[1].substr(4), ',');
  if (fields.size() != ms.size())
    throw ParseError("record has " + std::to_string(fields.size()) + " residues, set has " +
                     std::to_string(ms.size()));
  std::vector<std::uint32_t> residues;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].size() != hex_width(ms.modulus(i)))
      throw ParseError("residue " + std::to_string(i) + " must have " +
                       std::to_string(hex_width(ms.modulus(i))) + " hex digits");
    for (char c : fields[i])
      if (std::isupper(static_cast<unsigned char>(c))) throw ParseError("residues use lowercase hex");
    residues.push_back(parse_int<std::uint32_t>(fields[i], 16, "residue"));
  }
  const auto exponent = parse_int<std::int64_t>(t[2].substr(4), 10, "exponent");
  return HybridNum(ResidueVector(std::move(residues), ms), exponent);
}

Program parse_program(std::string_view text, const ModulusSet& ms, const HybridConfig& cfg) {
  Program program;
  bool header = false;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto t = tokens(line);
    if (t.empty()) continue;
    const auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
    if (!header) {
      if (t.size() != 2 || t[0] != "hrfna-program" || t[1] != "1")
        throw ParseError(where() + "expected header '" + std::string(kProgramHeader) + "'");
      header = true;
      continue;
    }
    if (t[0] == "lit") {
      if (t.size() < 3) throw ParseError(where() + "lit needs a name and a value");
      if (!valid_name(t[1])) throw ParseError(where() + "bad name '" + std::string(t[1]) + "'");
      std::optional<HybridNum> value;
      if (t.size() == 3) {
        const auto x = parse_real(t[2]);
        if (!x) throw ParseError(where() + "bad real '" + std::string(t[2]) + "'");
        value = from_real(*x, ms, cfg);
      } else {
        const auto start = t[2].data() - line.data();
        value = parse_record(line.substr(static_cast<std::size_t>(start)), ms);
      }
      program.literals.emplace_back(std::string(t[1]), std::move(*value));
    } else if (t[0] == "mul" || t[0] == "add") {
      if (t.size() != 3 && t.size() != 4)
        throw ParseError(where() + std::string(t[0]) + " takes two operands and an optional name");
      for (std::size_t i = 1; i < t.size(); ++i)
        if (!valid_name(t[i])) throw ParseError(where() + "bad name '" + std::string(t[i]) + "'");
      ProgramOp op{t[0] == "mul" ? OpKind::mul : OpKind::add, std::string(t[1]), std::string(t[2]),
                   t.size() == 4 ? std::string(t[3]) : "r" + std::to_string(program.ops.size())};
      program.ops.push_back(std::move(op));
    } else {
      throw ParseError(where() + "unknown statement '" + std::string(t[0]) + "'");
    }
  }
  if (!header) throw ParseError("missing header '" + std::string(kProgramHeader) + "'");
  return program;
}

std::string format_program(const Program& program) {
  std::string out = std::string(kProgramHeader) + "\n";
  for (const auto& [name, value] : program.literals)
    out += "lit " + name + " " + format_record(value) + "\n";
  for (const ProgramOp& op : program.ops)
    out += std::string(op.kind == OpKind::mul ? "mul " : "add ") + op.a + " " + op.b + " " +
           op.result + "\n";
  return out;
}

std::string format_trace_csv(const std::vector<TraceEvent>& trace) {
  std::string out = "# hrfna-trace v1\ncycle,unit,action,op_id,value_hex\n";
  for (const TraceEvent& e : trace) {
    out += std::to_string(e.cycle);
    out += ',';
    out += unit_name(e);
    out += ',';
    out += to_string(e.action);
    out += ',';
    if (e.op) out += std::to_string(*e.op);
    out += ',';
    out += e.value_hex;
    out += '\n';
  }
  return out;
}

std::string format_metrics_json(const Metrics& m) {
  json hist = json::object();
  for (const auto& [latency, count] : m.latency_histogram) hist[std::to_string(latency)] = count;
  const json doc{{"format", "hrfna-metrics/1"},
                 {"ops", m.ops},
                 {"latency_p50", m.latency_p50},
                 {"latency_max", m.latency_max},
                 {"achieved_ii", m.achieved_ii},
                 {"stall_cycles", m.stall_cycles},
                 {"norm_events", m.norm_events},
                 {"stall_fraction", m.stall_fraction},
                 {"latency_histogram", hist}};
  return doc.dump(2) + "\n";
}

std::string format_report_json(const DriftReport& r) {
  json doc{{"format", "hrfna-report/1"},
           {"workload", r.workload},
           {"seed", r.seed},
           {"steps", r.steps},
           {"prng", r.prng},
           {"config", hybrid_json(ModulusSet(r.moduli), r.config)},
           {"norm_events", r.norm_events},
           {"lossy_aligns", r.lossy_aligns},
           {"rel_error", r.rel_error},
           {"bound", r.bound},
           {"within_bound", r.within_bound},
           {"result", {{"mantissa_hex", r.result_mantissa}, {"exponent", r.result_exponent}}}};
  if (r.workload == "chained_mac") doc["mode"] = to_string(r.mode);
  return doc.dump(2) + "\n";
}

std::string format_vectors(const Program& program, const ModulusSet& ms, const HybridConfig& cfg) {
  check_program(program);
  validate(cfg, ms);
  std::map<std::string, HybridNum> regs;
  for (const auto& [name, value] : program.literals) regs.emplace(name, value);

  std::string out = "# hrfna-vectors v1\n# moduli";
  for (std::uint32_t m : ms.moduli()) out += " " + std::to_string(m);
  out += "\n# op-id kind x-residues x-f y-residues y-f | expect z-residues z-f norm-count\n";
  for (std::size_t i = 0; i < program.ops.size(); ++i) {
    const ProgramOp& op = program.ops[i];
    const HybridNum& x = regs.at(op.a);
    const HybridNum& y = regs.at(op.b);
    const OpOutcome r = op.kind == OpKind::mul ? hrfna_mul_traced(x, y, ms, cfg)
                                               : hrfna_add_traced(x, y, ms, cfg);
    out += std::to_string(i) + (op.kind == OpKind::mul ? " mul " : " add ");
    out += residue_fields(x.mantissa(), ' ') + " " + std::to_string(x.exponent()) + " ";
    out += residue_fields(y.mantissa(), ' ') + " " + std::to_string(y.exponent()) + " | expect ";
    out += residue_fields(r.value.mantissa(), ' ') + " " + std::to_string(r.value.exponent()) + " ";
    out += std::to_string(r.events.size()) + "\n";
    regs.insert_or_assign(op.result, r.value);
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("short write to " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " into place");
  }
}

}  // namespace hrfna
