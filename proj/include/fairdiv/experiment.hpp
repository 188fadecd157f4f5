#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairdiv/core.hpp"

namespace fairdiv {

enum class Target { PropCondition, PropAllocation, Chi2Bound, ChoresPenaltyBound };

const char* to_string(Target target);
Target parse_target(std::string_view name);

struct ExperimentConfig {
  Count n = 2;
  Count m = 2;
  Count trials = 1;
  std::uint64_t seed = 0;
  Kind kind = Kind::Goods;
  Target target = Target::PropAllocation;
  unsigned threads = 0;  // 0: hardware concurrency
};

void validate(const ExperimentConfig& config);

struct TrialOutcome {
  Count index = 0;
  std::uint64_t seed = 0;
  bool success = false;
  Real quantity = 0;  // the tested quantity; see quantity_name
  Real reference = 0; // bound it is compared with
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialOutcome> trials;
  Count successes = 0;
  Rational success_fraction;
  Real min_quantity = 0;
  Real median_quantity = 0;
  std::string quantity_name;
};

// Seed of trial i: splitmix64 of (seed + i).
std::uint64_t trial_seed(std::uint64_t seed, Count trial);

// n single agents, m items with one copy each. Values are u / 2^53 (goods)
// or (u + 1) / 2^53 (chores) for uniform 53-bit integers u.
Instance sample_instance(Count n, Count m, Kind kind, std::uint64_t seed);

// min_i chi^2(normalized row i || society valuation)
Real min_chi2_to_society(const Instance& inst);
// min_i sum_j (c_ij - H_j)^2 / c_ij
Real min_harmonic_penalty(const Instance& inst);
// Lower bound on one agent's penalty from the variational form with g = -1/2.
Real variational_penalty_bound(const Instance& inst, Index agent);

TrialOutcome run_trial(const ExperimentConfig& config, Count index);
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace fairdiv
