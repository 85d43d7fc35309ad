#pragma once

// JSON instance files. Top-level keys: nodes, arcs, services, service_arcs,
// origin, clients, cost_params, disruption.

#include <filesystem>
#include <string>

#include "json.hpp"
#include "rmsn/model.hpp"
#include "rmsn/path_solver.hpp"

namespace rmsn {

/// Insertion-ordered so written files have a stable key order.
using Json = nlohmann::ordered_json;

Json to_json(const Instance& instance);
Instance instance_from_json(const Json& doc);

/// Per-client path, outbound day, worst-case deviations and costs, plus totals.
Json to_json(const InstanceSolution& solution);

/// Two-space indented with a trailing newline.
std::string dump_json(const Json& doc);
Json parse_json(const std::string& text, const std::string& origin);

Instance read_instance(const std::filesystem::path& file);
void write_instance(const std::filesystem::path& file, const Instance& instance);

std::string read_text(const std::filesystem::path& file);
void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace rmsn
