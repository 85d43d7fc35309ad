// Command-line entry point.
//
// Exit codes: 0 success, 1 unexpected error, 2 usage or input error,
// 3 infeasible instance, 4 verification failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rmsn/experiments.hpp"
#include "rmsn/instance_gen.hpp"
#include "rmsn/instance_io.hpp"
#include "rmsn/lp_format.hpp"
#include "rmsn/milp.hpp"
#include "rmsn/milp_solution.hpp"
#include "rmsn/path_solver.hpp"

namespace fs = std::filesystem;
using namespace rmsn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitVerification = 4;

class VerificationFailed : public Error {
 public:
  using Error::Error;
};

fs::path default_out_dir() {
  const char* env = std::getenv("RMSN_OUT_DIR");
  return env && *env ? fs::path(env) : fs::path(".");
}

std::string money(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void print_breakdown(const CostBreakdown& c, std::ostream& out) {
  out << "  transport        " << money(c.transport) << "\n"
      << "  transshipment    " << money(c.transshipment) << "\n"
      << "  degradation      " << money(c.degradation) << "\n"
      << "  earliness        " << money(c.earliness_penalty) << "\n"
      << "  lateness         " << money(c.lateness_penalty) << "\n"
      << "  total            " << money(c.total) << "\n";
}

// Reads an instance and applies an optional budget override.
Instance load_instance(const fs::path& file, std::optional<double> gamma) {
  Instance inst = read_instance(file);
  if (gamma) inst.disruption.budget = *gamma;
  const ValidationReport report = validate_instance(inst);
  if (!report.ok()) throw InvalidInput("invalid instance '" + file.string() + "':\n" + report.summary());
  return inst;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw InvalidInput(flag + ": '" + item + "' is not an integer");
    }
  }
  if (out.empty()) throw InvalidInput(flag + " must not be empty");
  return out;
}

struct GenerateArgs {
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> targets;
  std::optional<int> clients;
  std::optional<double> puv;
  std::optional<double> rate;
  std::optional<fs::path> out_dir;
};

int cmd_generate(const GenerateArgs& a) {
  GeneratorConfig cfg;
  if (a.config) cfg = config_from_json(parse_json(read_text(*a.config), a.config->string()));
  if (a.seed) cfg.seed = *a.seed;
  if (a.targets) cfg.service_arc_targets = parse_int_list(*a.targets, "--targets");
  if (a.clients) cfg.n_clients = *a.clients;
  validate_config(cfg);
  const fs::path dir = a.out_dir.value_or(default_out_dir());
  auto instances = generate_instances(cfg);
  for (auto& inst : instances) {
    if (a.puv || a.rate) inst = disrupted(inst, a.puv.value_or(0.0), a.rate.value_or(0.0), cfg.seed, cfg.budget_fraction);
    const fs::path file = dir / ("instance_" + std::to_string(inst.network.service_arcs.size()) + ".json");
    write_instance(file, inst);
    std::cout << file.string() << ": " << inst.network.nodes.size() << " nodes, " << inst.network.arcs.size() << " arcs, "
              << inst.network.services.size() << " services, " << inst.network.service_arcs.size() << " service-arcs, "
              << inst.clients.size() << " clients, " << inst.disruption.uncertain_arcs.size() << " uncertain\n";
  }
  return kExitOk;
}

struct SolveArgs {
  fs::path instance;
  std::optional<double> gamma;
  unsigned workers = 1;
  std::optional<fs::path> out;
  std::optional<fs::path> values;
};

int cmd_solve(const SolveArgs& a) {
  const Instance inst = load_instance(a.instance, a.gamma);
  SolveOptions options;
  options.workers = a.workers;
  const InstanceSolution sol = solve_instance(inst.network, inst.clients, inst.disruption, inst.costs, options);
  const fs::path out = a.out.value_or(default_out_dir() / "solution.json");
  write_text(out, dump_json(to_json(sol)));
  if (a.values) {
    const milp::MilpModel model = milp::build_model(inst.network, inst.clients, inst.disruption, inst.costs);
    write_text(*a.values, milp::solution_text(model, inst.network, inst.clients, sol, inst.disruption));
  }
  std::cout << "status optimal\n";
  for (const auto& it : sol.itineraries) {
    std::cout << "client " << it.client << ": path";
    for (ArcIndex k : it.path) std::cout << " " << k;
    std::cout << ", outbound day " << it.outbound_day << ", worst-case arrival " << it.arrival_day() << ", cost "
              << money(it.costs.total) << "\n";
  }
  print_breakdown(sol.total, std::cout);
  std::cout << "solution written to " << out.string() << "\n";
  return kExitOk;
}

struct EmitArgs {
  fs::path instance;
  std::optional<double> gamma;
  std::optional<fs::path> out;
};

int cmd_emit_milp(const EmitArgs& a) {
  const Instance inst = load_instance(a.instance, a.gamma);
  const milp::MilpModel model = milp::build_model(inst.network, inst.clients, inst.disruption, inst.costs);
  const fs::path out = a.out.value_or(default_out_dir() / "model.lp");
  write_text(out, milp::emit_lp(model));
  std::cout << out.string() << ": " << model.variables.size() << " variables (" << model.count(milp::VarKind::binary)
            << " binary), " << model.constraints.size() << " constraints\n";
  return kExitOk;
}

struct VerifyArgs {
  fs::path instance;
  fs::path solution;
  std::optional<double> gamma;
};

int cmd_verify(const VerifyArgs& a) {
  const Instance inst = load_instance(a.instance, a.gamma);
  const milp::MilpModel model = milp::build_model(inst.network, inst.clients, inst.disruption, inst.costs);
  const std::string text = read_text(a.solution);
  milp::SolutionAssignments assignments;
  try {
    assignments = milp::parse_solution(model, text);
  } catch (const InvalidInput& e) {
    throw VerificationFailed(e.what());
  }
  for (const auto& w : assignments.warnings) std::cerr << "warning: " << w << "\n";
  const milp::VerificationReport report =
      milp::verify_solution(inst.network, inst.clients, inst.disruption, inst.costs, assignments);
  std::cout << "recomputed objective " << money(report.recomputed_objective) << "\n";
  if (report.claimed_objective) std::cout << "claimed objective    " << money(*report.claimed_objective) << "\n";
  if (!report.clean()) throw VerificationFailed(report.summary());
  std::cout << "verification clean\n";
  return kExitOk;
}

struct SweepArgs {
  std::optional<fs::path> config;
  std::optional<int> seeds;
  std::optional<std::uint64_t> first_seed;
  std::optional<std::string> targets;
  std::optional<std::string> client_levels;
  std::optional<unsigned> workers;
  std::optional<fs::path> out;
  bool quiet = false;
};

int cmd_sweep(const SweepArgs& a) {
  SweepConfig cfg;
  if (a.config) cfg = sweep_config_from_json(parse_json(read_text(*a.config), a.config->string()));
  if (a.seeds || a.first_seed) {
    const int n = a.seeds.value_or(static_cast<int>(cfg.seeds.size()));
    if (n < 1) throw InvalidInput("--seeds must be at least 1");
    const std::uint64_t first = a.first_seed.value_or(1);
    cfg.seeds.clear();
    for (int i = 0; i < n; ++i) cfg.seeds.push_back(first + static_cast<std::uint64_t>(i));
  }
  if (a.targets) cfg.generator.service_arc_targets = parse_int_list(*a.targets, "--targets");
  if (a.client_levels) cfg.client_levels = parse_int_list(*a.client_levels, "--client-levels");
  if (a.workers) cfg.workers = *a.workers;
  validate_sweep_config(cfg);

  SweepProgress progress;
  if (!a.quiet)
    progress = [](std::size_t done, std::size_t total) {
      if (done % 25 == 0 || done == total) std::fprintf(stderr, "\r%zu/%zu tasks", done, total);
      if (done == total) std::fprintf(stderr, "\n");
    };
  const SweepResults results = run_sweep(cfg, progress);
  const fs::path out = a.out.value_or(default_out_dir() / "sweep.json");
  write_text(out, dump_json(to_json(results)));
  std::size_t infeasible = 0;
  for (const auto& c : results.cells) infeasible += c.status == CellStatus::infeasible;
  std::cout << results.cells.size() << " cells (" << infeasible << " infeasible) written to " << out.string() << "\n";
  return kExitOk;
}

struct ReportArgs {
  fs::path results;
  std::optional<fs::path> out_dir;
  double threshold = 1.0;
};

int cmd_report(const ReportArgs& a) {
  const SweepResults results = sweep_results_from_json(parse_json(read_text(a.results), a.results.string()));
  const fs::path dir = a.out_dir.value_or(default_out_dir());
  const ReportFiles files = render_report(results, dir, a.threshold);
  for (const auto& t : files.tables) std::cout << t.string() << "\n";
  std::cout << files.chart.string() << "\n" << files.metrics.string() << "\n" << files.robustness.string() << "\n";
  return kExitOk;
}

struct CriticalArgs {
  fs::path instance;
  double rate = 1.0;
  std::optional<double> gamma;
  std::size_t top = 10;
  unsigned workers = 1;
  std::optional<fs::path> out;
};

int cmd_critical(const CriticalArgs& a) {
  const Instance inst = load_instance(a.instance, a.gamma);
  const auto ranked = rank_critical_arcs(inst.network, inst.clients, inst.costs, a.rate, inst.disruption.budget, a.workers);
  std::string csv = "rank,service_arc,service,from,to,impact\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& arc = inst.network.service_arcs[ranked[i].index];
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu,%zu,%d,%d,%d,%.6f\n", i + 1, ranked[i].index, arc.service, arc.from, arc.to,
                  ranked[i].impact);
    csv += buf;
    if (i < a.top) std::cout << buf;
  }
  if (a.out) write_text(*a.out, csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust multimodal service network planning"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate nested benchmark instances");
  g->add_option("--config", gen.config, "Generator config JSON")->check(CLI::ExistingFile);
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--targets", gen.targets, "Comma-separated service-arc counts, strictly increasing");
  g->add_option("--clients", gen.clients, "Number of clients");
  g->add_option("--puv", gen.puv, "Share of uncertain service-arcs in [0, 1]")->check(CLI::Range(0.0, 1.0));
  g->add_option("--rate", gen.rate, "Deviation rate in [0, 1]")->check(CLI::Range(0.0, 1.0));
  g->add_option("--out-dir", gen.out_dir, "Output directory (default $RMSN_OUT_DIR or .)");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve an instance exactly");
  s->add_option("instance", solve.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--gamma", solve.gamma, "Budget of uncertainty override")->check(CLI::NonNegativeNumber);
  s->add_option("--workers", solve.workers, "Clients solved in parallel")->check(CLI::PositiveNumber);
  s->add_option("--out", solve.out, "Solution JSON (default <out dir>/solution.json)");
  s->add_option("--values", solve.values, "Also write MILP variable values in `name value` form");

  EmitArgs emit;
  auto* e = app.add_subcommand("emit-milp", "Write the robust MILP in LP format");
  e->add_option("instance", emit.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  e->add_option("--gamma", emit.gamma, "Budget of uncertainty override")->check(CLI::NonNegativeNumber);
  e->add_option("--out", emit.out, "LP file (default <out dir>/model.lp)");

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Check a MILP solution against the instance");
  v->add_option("instance", verify.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  v->add_option("solution", verify.solution, "Solution values, one `name value` per line")->required()->check(CLI::ExistingFile);
  v->add_option("--gamma", verify.gamma, "Budget of uncertainty override")->check(CLI::NonNegativeNumber);

  SweepArgs sweep;
  auto* w = app.add_subcommand("sweep", "Run the sensitivity sweep");
  w->add_option("--config", sweep.config, "Sweep config JSON")->check(CLI::ExistingFile);
  w->add_option("--seeds", sweep.seeds, "Number of seeds");
  w->add_option("--first-seed", sweep.first_seed, "First seed (default 1)");
  w->add_option("--targets", sweep.targets, "Comma-separated service-arc counts");
  w->add_option("--client-levels", sweep.client_levels, "Comma-separated client counts");
  w->add_option("--workers", sweep.workers, "Parallel workers")->check(CLI::PositiveNumber);
  w->add_option("--out", sweep.out, "Results JSON (default <out dir>/sweep.json)");
  w->add_flag("--quiet", sweep.quiet, "No progress output");

  ReportArgs report;
  auto* r = app.add_subcommand("report", "Render tables, chart and metrics from sweep results");
  r->add_option("results", report.results, "Sweep results JSON")->required()->check(CLI::ExistingFile);
  r->add_option("--out-dir", report.out_dir, "Output directory (default $RMSN_OUT_DIR or .)");
  r->add_option("--threshold", report.threshold, "Relative change threshold for the robustness degree")
      ->check(CLI::NonNegativeNumber);

  CriticalArgs critical;
  auto* c = app.add_subcommand("critical", "Rank service-arcs by single-arc disruption impact");
  c->add_option("instance", critical.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  c->add_option("--rate", critical.rate, "Deviation rate in [0, 1]")->check(CLI::Range(0.0, 1.0));
  c->add_option("--gamma", critical.gamma, "Budget of uncertainty override")->check(CLI::NonNegativeNumber);
  c->add_option("--top", critical.top, "Rows printed");
  c->add_option("--workers", critical.workers, "Parallel workers")->check(CLI::PositiveNumber);
  c->add_option("--out", critical.out, "Full ranking CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kExitUsage;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*s) return cmd_solve(solve);
    if (*e) return cmd_emit_milp(emit);
    if (*v) return cmd_verify(verify);
    if (*w) return cmd_sweep(sweep);
    if (*r) return cmd_report(report);
    if (*c) return cmd_critical(critical);
  } catch (const Infeasible& ex) {
    std::cerr << "infeasible: " << ex.what() << "\n";
    return kExitInfeasible;
  } catch (const VerificationFailed& ex) {
    std::cerr << "verification failed:\n" << ex.what() << "\n";
    return kExitVerification;
  } catch (const InvalidInput& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
