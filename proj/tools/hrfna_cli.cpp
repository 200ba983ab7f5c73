// hrfna: command-line front end for the hybrid arithmetic library.
//
// Exit status: 0 success, 1 data error, 2 usage error. Failures print one
// line to stderr: error kind=<Kind> detail="<text>".

#include "hrfna/error.hpp"
#include "hrfna/io.hpp"
#include "hrfna/pipeline.hpp"
#include "hrfna/workloads.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <iostream>

namespace {

void diagnose(const std::string& kind, std::string detail) {
  std::string escaped;
  for (char c : detail) {
    if (c == '"' || c == '\\') escaped.push_back('\\');
    escaped.push_back(c == '\n' ? ' ' : c);
  }
  std::cerr << "error kind=" << kind << " detail=\"" << escaped << "\"\n";
}

std::string shortest(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    hrfna::write_atomic(out_path, content);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid residue/floating arithmetic tools"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "Config JSON (default: $HRFNA_CONFIG, else built-in)");

  double encode_x = 0.0;
  auto* encode = app.add_subcommand("encode", "Real number to hybrid record");
  encode->add_option("value", encode_x)->required();

  std::vector<std::string> decode_words;
  auto* decode = app.add_subcommand("decode", "Hybrid record to real number");
  decode->add_option("record", decode_words, "Record, quoted or as separate words")->required();

  std::string lhs, rhs;
  auto* mul = app.add_subcommand("mul", "Multiply two records");
  mul->add_option("x", lhs)->required();
  mul->add_option("y", rhs)->required();
  auto* add = app.add_subcommand("add", "Add two records");
  add->add_option("x", lhs)->required();
  add->add_option("y", rhs)->required();

  std::string program_path, trace_path, metrics_path;
  auto* simulate = app.add_subcommand("simulate", "Run a program through the pipeline model");
  simulate->add_option("program", program_path)->required();
  simulate->add_option("--trace", trace_path, "Write the trace CSV here");
  simulate->add_option("--metrics", metrics_path, "Write metrics JSON here (default: stdout)");

  std::string workload_name, mode_name = "random", report_path;
  std::uint64_t seed = 0, steps = 10000, length = 256;
  auto* workload = app.add_subcommand("workload", "Run a drift workload and print its report");
  workload->add_option("name", workload_name)
      ->required()
      ->check(CLI::IsMember({"chained_mac", "dot_product"}));
  workload->add_option("--seed", seed)->required();
  workload->add_option("--steps", steps, "chained_mac steps");
  workload->add_option("--length", length, "dot_product vector length");
  workload->add_option("--mode", mode_name, "chained_mac inputs")
      ->check(CLI::IsMember({"random", "unit_multipliers", "powers_of_two"}));
  workload->add_option("-o,--out", report_path, "Write the report here (default: stdout)");

  std::string vectors_out;
  auto* vectors = app.add_subcommand("vectors", "Program to hardware test-vector file");
  vectors->add_option("program", program_path)->required();
  vectors->add_option("-o,--out", vectors_out, "Write vectors here (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    diagnose("Usage", e.what());
    return 2;
  }

  try {
    std::optional<std::filesystem::path> path;
    if (!config_path.empty()) path = config_path;
    else path = hrfna::config_path_from_env();
    const hrfna::Config cfg = hrfna::load_config(path);
    const hrfna::ModulusSet& ms = cfg.moduli;

    if (*encode) {
      std::cout << hrfna::format_record(hrfna::from_real(encode_x, ms, cfg.hybrid)) << "\n";
    } else if (*decode) {
      std::string record;
      for (const auto& w : decode_words) record += (record.empty() ? "" : " ") + w;
      std::cout << shortest(hrfna::to_real(hrfna::parse_record(record, ms))) << "\n";
    } else if (*mul || *add) {
      const hrfna::HybridNum x = hrfna::parse_record(lhs, ms);
      const hrfna::HybridNum y = hrfna::parse_record(rhs, ms);
      const hrfna::HybridNum z =
          *mul ? hrfna::hrfna_mul(x, y, ms, cfg.hybrid) : hrfna::hrfna_add(x, y, ms, cfg.hybrid);
      std::cout << hrfna::format_record(z) << "\n";
    } else if (*simulate) {
      const hrfna::Program program =
          hrfna::parse_program(hrfna::read_file(program_path), ms, cfg.hybrid);
      const hrfna::SimResult r = hrfna::simulate(program, cfg.pipeline, cfg.hybrid, ms);
      if (!trace_path.empty()) hrfna::write_atomic(trace_path, hrfna::format_trace_csv(r.trace));
      emit(metrics_path, hrfna::format_metrics_json(r.metrics));
    } else if (*workload) {
      hrfna::DriftReport report;
      if (workload_name == "chained_mac") {
        hrfna::MacMode mode = hrfna::MacMode::random;
        if (mode_name == "unit_multipliers") mode = hrfna::MacMode::unit_multipliers;
        if (mode_name == "powers_of_two") mode = hrfna::MacMode::powers_of_two;
        report = hrfna::chained_mac(seed, steps, ms, cfg.hybrid, mode);
      } else {
        if (length == 0) throw hrfna::LengthMismatch("--length must be at least 1");
        report = hrfna::dot_product_report(seed, length, ms, cfg.hybrid);
      }
      emit(report_path, hrfna::format_report_json(report));
    } else if (*vectors) {
      const hrfna::Program program =
          hrfna::parse_program(hrfna::read_file(program_path), ms, cfg.hybrid);
      emit(vectors_out, hrfna::format_vectors(program, ms, cfg.hybrid));
    }
  } catch (const hrfna::Error& e) {
    diagnose(e.kind(), e.what());
    return 1;
  } catch (const hrfna::InternalError& e) {
    diagnose("InternalError", e.what());
    return 1;
  }
  return 0;
}
