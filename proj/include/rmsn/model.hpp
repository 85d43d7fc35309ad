#pragma once

// Domain types for the multi-modal service network: nodes, arcs, services,
// service-arcs, client orders, cost parameters and the disruption profile.

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rmsn {

using NodeId = int;
using ServiceId = int;
using ClientId = int;
/// Position of a service-arc in ServiceNetwork::service_arcs.
using ArcIndex = std::size_t;
using Path = std::vector<ArcIndex>;

/// Absolute tolerance on day and currency quantities.
inline constexpr double kTolerance = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

enum class Mode { air, rail, water };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

struct Arc {
  NodeId from = 0;
  NodeId to = 0;
  double distance_km = 0.0;
};

struct Service {
  ServiceId id = 0;
  Mode mode = Mode::rail;
  std::vector<NodeId> route;
};

struct ServiceArc {
  ServiceId service = 0;
  NodeId from = 0;
  NodeId to = 0;
  double nominal_time = 0.0;   // days
  double max_deviation = 0.0;  // days
  double unit_cost = 0.0;      // currency per product unit
};

struct ServiceNetwork {
  std::vector<NodeId> nodes;
  std::vector<Arc> arcs;
  std::vector<Service> services;
  std::vector<ServiceArc> service_arcs;
  NodeId origin = 0;

  const Service* find_service(ServiceId id) const;
  bool has_node(NodeId id) const;
};

struct ClientOrder {
  ClientId id = 0;
  NodeId destination = 0;
  double quantity = 0.0;
  double due_date = 0.0;
};

struct TransferKey {
  NodeId node = 0;
  ServiceId from_service = 0;
  ServiceId to_service = 0;
  auto operator<=>(const TransferKey&) const = default;
};

struct CostParams {
  double product_value = 100.0;
  double degradation_rate_per_day = 0.10;
  double early_penalty_per_day = 15.0;
  double late_penalty_per_day = 20.0;
  double shelf_life = 30.0;
  std::map<TransferKey, double> transshipment_cost;
  /// Used for (node, s1, s2) combinations absent from the map.
  double default_transshipment_cost = 0.0;

  /// Degradation cost per unit per day (rate times product value).
  double degradation_per_day() const { return degradation_rate_per_day * product_value; }

  /// Zero when both services are the same: staying aboard is not a transfer.
  double transfer_cost(NodeId node, ServiceId from_service, ServiceId to_service) const;
};

struct DisruptionProfile {
  /// Indices into ServiceNetwork::service_arcs.
  std::vector<ArcIndex> uncertain_arcs;
  /// t̂ = rate × t̄ on uncertain arcs. Unset when deviations are given per arc.
  std::optional<double> deviation_rate;
  double budget = 0.0;
};

/// Returns a copy of `net` whose max_deviation follows `profile`: rate × nominal
/// time on uncertain arcs, zero elsewhere. Without a rate, `net` is returned as is.
ServiceNetwork with_disruption(const ServiceNetwork& net, const DisruptionProfile& profile);

struct Instance {
  ServiceNetwork network;
  std::vector<ClientOrder> clients;
  CostParams costs;
  DisruptionProfile disruption;
};

// ---------------------------------------------------------------------------
// Validation

struct Finding {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const { return findings.empty(); }
  bool has(std::string_view code) const;
  std::string summary() const;
};

ValidationReport validate_network(const ServiceNetwork& net, const std::vector<ClientOrder>& orders,
                                  const CostParams& costs);

/// Also checks the disruption profile against the network.
ValidationReport validate_instance(const Instance& instance);

// ---------------------------------------------------------------------------
// Transshipment-expanded search graph
//
// States are service-arcs. An edge a -> b exists when a enters the node b
// leaves from; it carries the transfer cost of switching from a's service to
// b's service at that node. The virtual source connects to every service-arc
// leaving the origin; the sinks for destination d are the service-arcs
// entering d. Node-simple source-to-sink walks are exactly the service-arc
// sequences satisfying flow balance and availability for one client.

class ExpandedGraph {
 public:
  struct Edge {
    ArcIndex to;
    double transfer_cost;
  };

  ExpandedGraph(const ServiceNetwork& net, const CostParams& costs);

  std::size_t node_count() const { return node_ids_.size(); }
  std::size_t dense(NodeId id) const;
  NodeId node_id(std::size_t dense_index) const { return node_ids_[dense_index]; }

  /// Service-arcs leaving the origin, ascending.
  const std::vector<ArcIndex>& source_arcs() const { return source_arcs_; }
  /// Successor states of a service-arc, ascending by index.
  const std::vector<Edge>& successors(ArcIndex arc) const { return successors_[arc]; }
  /// Service-arcs entering a node (dense index), ascending.
  const std::vector<ArcIndex>& arcs_into(std::size_t dense_node) const { return into_[dense_node]; }
  const std::vector<ArcIndex>& arcs_out_of(std::size_t dense_node) const { return out_of_[dense_node]; }

  std::size_t head(ArcIndex arc) const { return head_[arc]; }
  std::size_t tail(ArcIndex arc) const { return tail_[arc]; }
  std::size_t arc_count() const { return head_.size(); }

  std::size_t origin() const { return origin_; }

  /// Sum of transfer costs along consecutive service-arcs of `path`. Throws
  /// InvalidInput when two consecutive arcs are not linked.
  double transfer_cost(const Path& path) const;

  /// All node-simple source-to-sink paths for `destination`, in ascending
  /// lexicographic order of service-arc indices.
  std::vector<Path> enumerate_paths(NodeId destination) const;

 private:
  std::vector<NodeId> node_ids_;
  std::unordered_map<NodeId, std::size_t> dense_;
  std::vector<std::size_t> tail_;
  std::vector<std::size_t> head_;
  std::size_t origin_ = 0;
  std::vector<ArcIndex> source_arcs_;
  std::vector<std::vector<Edge>> successors_;
  std::vector<std::vector<ArcIndex>> into_;
  std::vector<std::vector<ArcIndex>> out_of_;
};

ExpandedGraph build_search_graph(const ServiceNetwork& net, const CostParams& costs);

/// Checks that `path` chains head-to-tail from the origin to `destination`
/// without repeating a node. Returns an empty string when it does, otherwise
/// a description of the first problem.
std::string describe_path_defect(const ServiceNetwork& net, const Path& path, NodeId destination);

}  // namespace rmsn
