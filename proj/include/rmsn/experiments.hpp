#pragma once

// Sensitivity sweeps over network size, client count, share of uncertain
// service-arcs and deviation rate, plus the metrics and reports built on them.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rmsn/instance_gen.hpp"
#include "rmsn/path_solver.hpp"

namespace rmsn {

struct SweepConfig {
  /// Network sizes come from generator.service_arc_targets; the client count
  /// in the generator is replaced by the largest client level.
  GeneratorConfig generator;
  std::vector<std::uint64_t> seeds{1};
  std::vector<double> puv_levels{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> rate_levels{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<int> client_levels{1, 3, 5};
  unsigned workers = 1;
};

void validate_sweep_config(const SweepConfig& cfg);
Json to_json(const SweepConfig& cfg);
/// Keys: generator, seeds, puv_levels, rate_levels, client_levels, workers.
SweepConfig sweep_config_from_json(const Json& json);

enum class CellStatus { optimal, infeasible };

struct SweepCell {
  int network_size = 0;
  int clients = 0;
  double puv = 0.0;
  double deviation_rate = 0.0;
  std::uint64_t seed = 0;
  CellStatus status = CellStatus::optimal;
  CostBreakdown costs;
  /// Sum of the solve times of the cell's clients.
  double solve_time_seconds = 0.0;
  std::vector<ClientId> infeasible_clients;
};

struct SweepResults {
  SweepConfig config;
  /// Sorted by network size, clients, puv, rate, seed.
  std::vector<SweepCell> cells;
};

/// Called after each finished (seed, network, puv, rate) task with the
/// number of tasks done and the total. May be called from worker threads.
using SweepProgress = std::function<void(std::size_t done, std::size_t total)>;

SweepResults run_sweep(const SweepConfig& cfg, const SweepProgress& progress = {});

Json to_json(const SweepResults& results);
SweepResults sweep_results_from_json(const Json& json);

struct MetricRow {
  int network_size = 0;
  int clients = 0;
  double puv = 0.0;
  double deviation_rate = 0.0;
  std::uint64_t seed = 0;
  double total = 0.0;
  double baseline = 0.0;
  double absolute_change = 0.0;
  double relative_change = 0.0;
};

struct RobustnessDegree {
  int network_size = 0;
  int clients = 0;
  /// Largest rate at the highest puv level whose mean relative change over
  /// seeds stays below the threshold. Unset when none does.
  std::optional<double> degree;
};

struct ResilienceMetrics {
  std::vector<MetricRow> rows;
  std::vector<RobustnessDegree> robustness;
};

/// The baseline of a cell is the puv = 0 cell of the same network size,
/// client count and seed. Infeasible cells are left out. Throws InvalidInput
/// naming the stratum when a baseline is missing or infeasible.
ResilienceMetrics resilience_metrics(const SweepResults& results, double threshold = 1.0);

struct CriticalArc {
  ArcIndex index = 0;
  double impact = 0.0;
};

/// Cost increase when only service-arc v deviates at `rate`, for every v.
/// Sorted by impact descending, then index ascending.
std::vector<CriticalArc> rank_critical_arcs(const ServiceNetwork& net, const std::vector<ClientOrder>& orders,
                                            const CostParams& costs, double rate, double budget, unsigned workers = 1);

struct ReportFiles {
  std::vector<std::filesystem::path> tables;
  std::filesystem::path chart;
  std::filesystem::path metrics;
  std::filesystem::path robustness;
};

/// Writes table_<k>clients.csv per client level, figure.svg, metrics.csv and
/// robustness.csv into `out_dir`, creating it if needed.
ReportFiles render_report(const SweepResults& results, const std::filesystem::path& out_dir, double threshold = 1.0);

/// The individual artifacts, for callers that do not want files.
std::string render_table_csv(const SweepResults& results, int clients, int first_row_number);
std::string render_chart_svg(const SweepResults& results);
std::string render_metrics_csv(const ResilienceMetrics& metrics);
std::string render_robustness_csv(const ResilienceMetrics& metrics);

}  // namespace rmsn
