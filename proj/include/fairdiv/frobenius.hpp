#pragma once

#include <optional>
#include <vector>

#include "fairdiv/numeric.hpp"

namespace fairdiv {

/// Nonnegative coefficients x with sum_i x_i * sizes_i == target.
struct Decomposition {
  std::vector<Count> coefficients;
};

// Lexicographically smallest representation (x_1 first), or nullopt.
std::optional<Decomposition> decompose(const std::vector<Count>& sizes, Count target);
bool is_representable(const std::vector<Count>& sizes, Count target);

}  // namespace fairdiv
