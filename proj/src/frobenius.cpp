#include "fairdiv/frobenius.hpp"

#include "fairdiv/core.hpp"

namespace fairdiv {

namespace {

void check_sizes(const std::vector<Count>& sizes, Count target) {
  if (sizes.empty()) throw FairDivisionError(ErrorKind::InvalidInput, "no sizes");
  for (Count s : sizes)
    if (s < 1) throw FairDivisionError(ErrorKind::InvalidInput, "sizes must be >= 1");
  if (target < 0) throw FairDivisionError(ErrorKind::InvalidInput, "target must be >= 0");
}

}  // namespace

std::optional<Decomposition> decompose(const std::vector<Count>& sizes, Count target) {
  check_sizes(sizes, target);
  const size_t d = sizes.size();
  const auto width = static_cast<size_t>(target) + 1;
  // reach[i][r]: r is a nonnegative combination of sizes[i..d).
  std::vector<std::vector<char>> reach(d + 1, std::vector<char>(width, 0));
  reach[d][0] = 1;
  for (size_t i = d; i-- > 0;) {
    const auto s = static_cast<size_t>(sizes[i]);
    for (size_t r = 0; r < width; ++r)
      reach[i][r] = reach[i + 1][r] || (r >= s && reach[i][r - s]);
  }
  if (!reach[0][static_cast<size_t>(target)]) return std::nullopt;

  Decomposition out;
  out.coefficients.assign(d, 0);
  auto rest = static_cast<size_t>(target);
  for (size_t i = 0; i < d; ++i) {
    const auto s = static_cast<size_t>(sizes[i]);
    while (!reach[i + 1][rest]) {
      rest -= s;
      ++out.coefficients[i];
    }
  }
  return out;
}

bool is_representable(const std::vector<Count>& sizes, Count target) {
  return decompose(sizes, target).has_value();
}

}  // namespace fairdiv
