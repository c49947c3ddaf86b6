#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "pcore/assembler.hpp"
#include "pcore/config.hpp"
#include "pcore/core.hpp"
#include "pcore/image.hpp"
#include "pcore/swcu.hpp"
#include "pcore/trace.hpp"
#include "pcore/wcet.hpp"

namespace {

using namespace pcore;

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Times on the command line are cycles, or milliseconds with an `ms` suffix.
uint64_t parse_time(const std::string& text, uint64_t clock_hz, bool* any_ms) {
  std::string t = text;
  bool ms = false;
  if (t.size() > 2 && t.substr(t.size() - 2) == "ms") {
    ms = true;
    t.resize(t.size() - 2);
  }
  if (ms) {
    if (any_ms) *any_ms = true;
    double v = std::stod(t);
    return static_cast<uint64_t>(std::llround(v * static_cast<double>(clock_hz) / 1000.0));
  }
  return std::stoull(t);
}

void print_timeline_rows(std::ostream& os, const std::vector<TimelineRow>& rows) {
  os << "partition,e_start,e_end\n";
  for (const auto& row : rows) {
    if (row.partition < 0)
      os << "idle";
    else
      os << row.partition;
    os << "," << row.start << "," << row.end << "\n";
  }
}

int cmd_asm(const std::string& input, const std::string& out_base, int hazard_distance) {
  assembler::Artifacts art = assembler::assemble(read_file(input), hazard_distance);
  write_code_image(out_base + ".bin", art.code);
  write_data_image(out_base + ".dat", art.data);
  std::ofstream lst(out_base + ".lst");
  if (!lst) throw std::runtime_error("cannot open for writing: " + out_base + ".lst");
  lst << art.listing;
  std::cout << out_base << ".bin: " << art.code.size() << " words, " << out_base << ".dat: "
            << art.data.words.size() << " words\n";
  return 0;
}

int cmd_validate(const std::string& path, uint64_t horizon) {
  RunConfig cfg = parse_config_file(path);
  ValidationReport report = validate_schedule(cfg.schedule, horizon);
  if (report.ok()) {
    std::cout << "ok: no conflicts over " << report.horizon_checked << " cycles";
    if (report.horizon_capped) std::cout << " (hyperperiod capped)";
    std::cout << "\n";
    return 0;
  }
  for (const auto& issue : report.issues)
    std::cerr << (issue.kind == ScheduleIssue::Kind::BadParameter ? "parameter: " : "conflict: ")
              << issue.message << "\n";
  return report.parameters_ok ? 1 : 2;
}

int cmd_timeline(const std::string& path, uint64_t horizon) {
  RunConfig cfg = parse_config_file(path);
  print_timeline_rows(std::cout, grant_timeline(cfg.schedule, horizon));
  return 0;
}

int cmd_run(const std::string& path, const std::string& trace_override, uint64_t horizon_override) {
  RunConfig cfg = parse_config_file(path);
  if (horizon_override > 0) cfg.horizon = horizon_override;
  if (!trace_override.empty()) cfg.trace_path = trace_override;
  if (cfg.trace_path.empty()) cfg.trace_path = "trace.csv";

  ValidationReport report = validate_schedule(cfg.schedule, cfg.horizon);
  if (!report.ok()) {
    std::cerr << "schedule rejected:\n";
    for (const auto& issue : report.issues) std::cerr << "  " << issue.message << "\n";
    return 1;
  }

  Simulator sim(cfg.schedule, cfg.verbose);
  for (int p = 0; p < 3; ++p) {
    CodeImage code;
    DataImage data;
    if (!cfg.code_paths[p].empty()) code = read_code_image(cfg.code_paths[p]);
    if (!cfg.data_paths[p].empty()) data = read_data_image(cfg.data_paths[p]);
    if (!code.empty() || !data.words.empty()) sim.load_partition(p, code, data);
  }
  if (!cfg.inject_path.empty()) sim.set_injections(parse_injection_csv(cfg.inject_path));

  sim.run(cfg.horizon);

  std::ofstream tf(cfg.trace_path);
  if (!tf) throw std::runtime_error("cannot open for writing: " + cfg.trace_path);
  write_csv(tf, sim.trace());

  std::cout << "cycles: " << sim.cycle() << "\n";
  std::cout << "grant timeline:\n";
  print_timeline_rows(std::cout, timeline_from_trace(sim.trace(), cfg.horizon));
  std::cout << "uart tx:\n";
  for (const auto& e : sim.trace().events)
    if (e.kind == EventKind::UartTx)
      std::cout << e.cycle << "," << e.partition << "," << e.value << "\n";
  std::cout << "retired: p0=" << sim.retired()[0] << " p1=" << sim.retired()[1]
            << " p2=" << sim.retired()[2] << "\n";
  std::cout << "trace: " << cfg.trace_path << "\n";
  return 0;
}

int cmd_wcet(const std::string& tau_a0_s, const std::string& tau_p_s, const std::string& ep_s,
             const std::string& ep_config, int ep_partition, bool force_ms, uint64_t clock_hz) {
  bool any_ms = force_ms;
  wcet::WcetQuery q;
  q.tau_a0 = parse_time(tau_a0_s, clock_hz, &any_ms);
  q.tau_p = parse_time(tau_p_s, clock_hz, &any_ms);
  if (!ep_config.empty()) {
    RunConfig cfg = parse_config_file(ep_config);
    uint64_t horizon = 4 * cfg.schedule.parts[ep_partition].period_cycles +
                       cfg.schedule.parts[ep_partition].offset_cycles;
    auto rows = grant_timeline(cfg.schedule, horizon);
    uint64_t first = 0, second = 0;
    int seen = 0;
    for (const auto& row : rows) {
      if (row.partition != ep_partition) continue;
      if (seen == 0) first = row.start;
      if (seen == 1) second = row.start;
      if (++seen == 2) break;
    }
    if (seen < 2) throw std::runtime_error("partition receives fewer than two grants");
    q.ep = second - first;
  } else {
    q.ep = parse_time(ep_s, clock_hz, &any_ms);
  }

  uint64_t result = wcet::effective_wcet(q);
  double ms = static_cast<double>(result) * 1000.0 / static_cast<double>(clock_hz);
  if (any_ms)
    std::printf("effective WCET: %" PRIu64 " cycles (%.5f ms)\n", result, ms);
  else
    std::printf("effective WCET: %" PRIu64 " cycles\n", result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partitioned soft-core toolchain: assembler, simulator, timing analysis"};
  app.require_subcommand(1);

  std::string asm_input, asm_out;
  int hazard_distance = 2;
  auto* c_asm = app.add_subcommand("asm", "assemble a source file into .bin/.dat/.lst");
  c_asm->add_option("input", asm_input, "assembly source")->required();
  c_asm->add_option("-o,--output", asm_out, "output base name")->required();
  c_asm->add_option("--hazard-distance", hazard_distance, "pipeline hazard distance (default 2)");

  std::string run_config, run_trace;
  uint64_t run_horizon = 0;
  auto* c_run = app.add_subcommand("run", "simulate a configured system");
  c_run->add_option("-c,--config", run_config, "run configuration")->required();
  c_run->add_option("-o,--trace", run_trace, "trace output path (overrides config)");
  c_run->add_option("--horizon", run_horizon, "simulation horizon in cycles (overrides config)");

  std::string w_a0, w_p, w_ep, w_ep_config;
  int w_ep_partition = 0;
  bool w_ms = false;
  uint64_t w_clock = 50'000'000;
  auto* c_wcet = app.add_subcommand("wcet", "effective WCET of a task inside a partition");
  c_wcet->add_option("--tau-a0", w_a0, "task WCET on an unpartitioned core")->required();
  c_wcet->add_option("--tau-p", w_p, "partition execution time")->required();
  c_wcet->add_option("--ep", w_ep, "partition periodicity, grant to grant");
  c_wcet->add_option("--ep-from-config", w_ep_config, "derive --ep from a schedule's grant timeline");
  c_wcet->add_option("--ep-partition", w_ep_partition, "partition for --ep-from-config");
  c_wcet->add_flag("--ms", w_ms, "report in milliseconds");
  c_wcet->add_option("--clock-hz", w_clock, "clock for ms conversions (default 50000000)");

  std::string val_config;
  uint64_t val_horizon = 0;
  auto* c_val = app.add_subcommand("validate", "check a schedule for conflicts");
  c_val->add_option("schedule", val_config, "schedule/config file")->required();
  c_val->add_option("--horizon", val_horizon, "cycles to check (default: one hyperperiod)");

  std::string tl_config;
  uint64_t tl_horizon = 0;
  auto* c_tl = app.add_subcommand("timeline", "print the grant timeline without simulating");
  c_tl->add_option("-c,--config", tl_config, "schedule/config file")->required();
  c_tl->add_option("--horizon", tl_horizon, "cycles to enumerate")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_asm->parsed()) return cmd_asm(asm_input, asm_out, hazard_distance);
    if (c_run->parsed()) return cmd_run(run_config, run_trace, run_horizon);
    if (c_wcet->parsed()) {
      if (w_ep.empty() && w_ep_config.empty())
        throw std::runtime_error("one of --ep or --ep-from-config is required");
      return cmd_wcet(w_a0, w_p, w_ep, w_ep_config, w_ep_partition, w_ms, w_clock);
    }
    if (c_val->parsed()) return cmd_validate(val_config, val_horizon);
    if (c_tl->parsed()) return cmd_timeline(tl_config, tl_horizon);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return c_val->parsed() ? 2 : 1;
  }
  return 0;
}
