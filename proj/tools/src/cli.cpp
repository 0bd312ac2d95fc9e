#include "trustsim_cli/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "trustsim/config.hpp"
#include "trustsim/errors.hpp"
#include "trustsim/sim.hpp"
#include "trustsim/trace_io.hpp"
#include "trustsim/verifier.hpp"

namespace trustsim::cli {
namespace {

namespace fs = std::filesystem;

// Up to three decimals, trailing zeros dropped.
std::string num(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << v;
  std::string r = s.str();
  r.erase(r.find_last_not_of('0') + 1);
  if (r.back() == '.') r.pop_back();
  return r == "-0" ? "0" : r;
}

fs::path resolve_scenario(const std::string& name) {
  fs::path p(name);
  if (fs::is_regular_file(p)) return p;
  fs::path with_ext = p;
  with_ext += ".json";
  if (fs::is_regular_file(with_ext)) return with_ext;
  throw ConfigError("scenario not found: " + name);
}

LoadedTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceFormatError("cannot open " + path);
  return read_trace(in);
}

struct RunArgs {
  std::string scenario;
  std::string config;
  std::uint64_t seed = 42;
  std::string out;
  std::string ledger;
};

int cmd_run(const RunArgs& a, std::ostream& out) {
  fs::path scenario = resolve_scenario(a.scenario);
  fs::path config_path(a.config);
  RunConfig config = load_run_config(scenario, a.config.empty() ? nullptr : &config_path);
  Trace trace = run(config, a.seed);

  fs::path trace_path = a.out.empty() ? fs::path(scenario.stem().string() + ".trace.jsonl") : fs::path(a.out);
  fs::path ledger_path = a.ledger.empty() ? fs::path(trace_path).replace_extension(".ledger.jsonl") : fs::path(a.ledger);
  {
    std::ofstream f(trace_path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + trace_path.string());
    write_trace(f, trace);
  }
  {
    std::ofstream f(ledger_path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + ledger_path.string());
    write_ledger(f, trace);
  }

  const auto& s = trace.summary;
  out << s.sensed << " sensed, " << s.committed << " committed, " << s.recovered << " recovered, " << s.alarms
      << " alarms\n";
  if (trace.status.failed()) out << "device failed: " << trace.status.reason << "\n";
  out << "trace: " << trace_path.string() << "\nledger: " << ledger_path.string() << "\n";
  return kOk;
}

int cmd_audit(const std::string& trace_path, const std::string& params_path, bool as_json, std::ostream& out) {
  LoadedTrace t = load_trace(trace_path);
  TimingParams p = params_path.empty() ? timing_params(t.config) : timing_params_from_json(read_json_file(params_path));
  AuditReport report;
  try {
    report = audit(t.entity, t.device_pk, p);
  } catch (const AuditError& e) {
    out << "audit: " << e.what() << "\n";
    return kAuditFailed;
  }
  if (as_json) {
    nlohmann::json j = report;
    out << j.dump(2) << "\n";
  } else {
    out << format_report(report);
  }
  return report.trustworthy() ? kOk : kAuditFailed;
}

void print_summary(std::ostream& out, const char* name, const Summary& s) {
  out << name << ": mean " << num(s.mean) << " ms, var " << num(s.variance) << " ms^2, min " << num(s.min)
      << " ms, max " << num(s.max) << " ms (n=" << s.count << ")\n";
}

int cmd_stats(const std::string& trace_path, const std::string& series, std::ostream& out) {
  LoadedTrace t = load_trace(trace_path);
  if (t.lifecycle.empty()) throw TraceFormatError("trace holds no records");

  if (series.empty()) {
    LatencyStats st = latency_stats(t.lifecycle);
    print_summary(out, "eps1", st.eps1);
    print_summary(out, "eps2", st.eps2);
    print_summary(out, "eps3", st.eps3);
    out << "max T-t: " << num(st.max_latency_ms) << " ms\n";
    return kOk;
  }

  if (series == "temp") {
    out << "t_ms\ttemperature_c\trecovered\n";
    for (const auto& r : t.lifecycle) out << r.timestamp_ms << '\t' << num(r.reading.temperature_c) << '\t' << r.recovered << '\n';
  } else if (series == "lux") {
    out << "t_ms\tbright\trecovered\n";
    for (const auto& r : t.lifecycle) out << r.timestamp_ms << '\t' << int(r.reading.brightness) << '\t' << r.recovered << '\n';
  } else if (series == "gps") {
    out << "t_ms\tlatitude\tlongitude\trecovered\n";
    for (const auto& r : t.lifecycle) {
      out << r.timestamp_ms << '\t' << std::setprecision(9) << r.reading.latitude << '\t' << r.reading.longitude
          << '\t' << r.recovered << '\n';
    }
  } else {
    out << "t_ms\teps1_ms\teps2_ms\teps3_ms\tlatency_ms\trecovered\n";
    for (const auto& r : t.lifecycle) {
      out << r.timestamp_ms;
      if (r.committed() && r.sent_at && r.arrived_at) {
        out << '\t' << num(to_ms(*r.sent_at - r.sensed_at)) << '\t' << num(to_ms(*r.arrived_at - *r.sent_at)) << '\t'
            << num(to_ms(*r.committed_at - *r.arrived_at)) << '\t'
            << num(to_ms(*r.committed_at) - static_cast<double>(r.timestamp_ms));
      } else {
        out << "\tNA\tNA\tNA\tNA";
      }
      out << '\t' << r.recovered << '\n';
    }
  }
  return kOk;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulate and audit a TEE sensing device anchored on a blockchain", "trustsim"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario; write trace and ledger");
  run_cmd->add_option("scenario,--scenario", run_args.scenario, "Scenario file (.json optional)");
  run_cmd->add_option("--config", run_args.config, "Config file overriding the scenario's embedded config");
  run_cmd->add_option("--seed", run_args.seed, "Run seed")->capture_default_str();
  run_cmd->add_option("--out", run_args.out, "Trace output path (default <scenario>.trace.jsonl)");
  run_cmd->add_option("--ledger", run_args.ledger, "Ledger output path (default next to the trace)");

  std::string trace_path, params_path, series;
  bool as_json = false;
  auto* audit_cmd = app.add_subcommand("audit", "Audit the digital entity in a trace");
  audit_cmd->add_option("--trace", trace_path, "Trace file")->required();
  audit_cmd->add_option("--params", params_path, "Timing parameters (default: derived from the trace config)");
  audit_cmd->add_flag("--json", as_json, "Print the report as JSON");

  auto* stats_cmd = app.add_subcommand("stats", "Latency statistics and plot-ready series");
  stats_cmd->add_option("--trace", trace_path, "Trace file")->required();
  stats_cmd->add_option("--series", series, "Emit one data series instead of the summary")
      ->check(CLI::IsMember({"temp", "lux", "gps", "latency"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "trustsim: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (run_cmd->parsed()) {
      if (run_args.scenario.empty()) {
        err << "trustsim run: a scenario is required\n";
        return kUsage;
      }
      return cmd_run(run_args, out);
    }
    if (audit_cmd->parsed()) return cmd_audit(trace_path, params_path, as_json, out);
    return cmd_stats(trace_path, series, out);
  } catch (const Error& e) {
    err << "trustsim: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "trustsim: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace trustsim::cli
