#pragma once

// Seeded generation of nested benchmark networks, clients and disruption
// profiles. Every draw comes from a substream keyed by the entity it belongs
// to, so adding clients or services leaves everything else unchanged.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rmsn/instance_io.hpp"
#include "rmsn/model.hpp"

namespace rmsn {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct ModeParams {
  double share = 0.0;    // fraction of services
  Range speed_kmh;       // per service-arc
  Range cost_per_km;     // per service-arc
};

struct GeneratorConfig {
  std::uint64_t seed = 1;
  int n_nodes = 27;
  int n_arcs = 48;
  std::vector<int> service_arc_targets{50, 100, 150};
  int n_clients = 5;

  Range distance_km{300.0, 12500.0};
  /// Indexed by Mode: air, rail, water.
  std::array<ModeParams, 3> modes{{
      {0.2, {800.0, 1000.0}, {1.0, 2.0}},
      {0.5, {50.0, 70.0}, {0.15, 0.30}},
      {0.3, {46.3, 50.0}, {0.05, 0.20}},
  }};
  /// Unit transport cost = cost per km × distance ÷ cost_divisor.
  double cost_divisor = 100.0;
  int max_route_arcs = 4;
  Range transfer_same_mode{10.0, 15.0};
  Range transfer_cross_mode{15.0, 25.0};

  double product_value = 100.0;
  double degradation_rate_per_day = 0.10;
  double early_penalty_per_day = 15.0;
  double late_penalty_per_day = 20.0;
  double shelf_life = 30.0;

  int quantity_min = 5;
  int quantity_max = 10;
  Range due_factor{0.8, 1.2};
  /// A destination is accepted when its fastest nominal time on the first
  /// network, scaled by 1 + this rate, fits the shelf life.
  double feasibility_rate = 1.0;
  int client_retry_cap = 1000;

  /// Budget as a fraction of the service-arc count.
  double budget_fraction = 0.5;
};

/// Throws InvalidInput naming the first offending field.
void validate_config(const GeneratorConfig& cfg);

Json to_json(const GeneratorConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
GeneratorConfig config_from_json(const Json& json);

struct BaseGraph {
  std::vector<NodeId> nodes;
  std::vector<Arc> arcs;
  NodeId origin = 0;
};

/// Spanning arborescence from the origin plus random extra arcs.
BaseGraph generate_base_graph(const GeneratorConfig& cfg);

/// One network per target; each extends the previous one, so service ids and
/// service-arc indices of a smaller network are a prefix of the next.
std::vector<ServiceNetwork> generate_services(const BaseGraph& base, const GeneratorConfig& cfg);

/// Cost parameters with transshipment costs for every (node, s1, s2) with s1
/// entering and s2 leaving the node. Shared entries agree across nested networks.
CostParams generate_costs(const ServiceNetwork& net, const GeneratorConfig& cfg);

/// Client i depends only on the seed and clients before it.
std::vector<ClientOrder> generate_clients(const ServiceNetwork& net, int n, const GeneratorConfig& cfg);

/// The uncertain set is the first ceil(puv·|V|) entries of one seeded
/// permutation of the service-arcs, so sets are nested across puv levels.
DisruptionProfile apply_disruption(const ServiceNetwork& net, double puv, double rate, std::uint64_t seed,
                                   double budget_fraction = 0.5);

/// Undisrupted instances, one per target, sharing clients.
std::vector<Instance> generate_instances(const GeneratorConfig& cfg);

/// `instance` with its disruption replaced and deviations applied to the network.
Instance disrupted(const Instance& instance, double puv, double rate, std::uint64_t seed, double budget_fraction);

}  // namespace rmsn
