#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "fairdiv/cake.hpp"
#include "fairdiv/core.hpp"

namespace fairdiv {

/// Instance document:
///   {"kind": "goods", "groups": [{"size": 2}, ...],
///    "types": [{"copies": 4, "values": ["1/2", "3", ...]}, ...]}
/// with one value per group in each type. An optional "allocation" array holds,
/// per group in input order, the per-agent copy counts of each type.
Instance parse_instance(std::string_view text);
std::string serialize_instance(const Instance& inst);

// Allocation stored alongside an instance, rows permuted to the sorted group order.
std::optional<IntegralAllocation> parse_allocation(std::string_view text, const Instance& inst);

struct DensitySpec {
  std::vector<PiecewiseLinearDensity> agents;
  ProtocolOptions options;
};

/// {"agents": [[["0", "1"], ["1/2", "2"], ["1", "0"]], ...], "delta": 0.1, "pieces": 8}
/// where each agent lists (breakpoint, value) pairs.
DensitySpec parse_densities(std::string_view text);

Notion parse_notion(std::string_view name);
Kind parse_kind(std::string_view name);

std::string read_file(const std::string& path);

}  // namespace fairdiv
