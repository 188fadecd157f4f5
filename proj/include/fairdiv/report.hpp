#pragma once

#include <string>
#include <string_view>

#include "fairdiv/cake.hpp"
#include "fairdiv/conditions.hpp"
#include "fairdiv/experiment.hpp"
#include "fairdiv/frobenius.hpp"
#include "fairdiv/greedy.hpp"
#include "fairdiv/pipeline.hpp"

namespace fairdiv {

enum class Format { Human, Json, Csv };

Format parse_format(std::string_view name);

inline constexpr int report_schema_version = 1;

// Reals are written with enough digits to read back the same long double.
std::string emit_report(const ExperimentReport& report, Format format);
ExperimentReport parse_report_json(std::string_view text);

// Allocation rows come out in the input group order.
std::string render_condition(const ConditionReport& report, Format format);
std::string render_pipeline(const Instance& inst, const PipelineResult& result, Format format);
std::string render_verdict(const Instance& inst, const IntegralAllocation& alloc, Notion notion,
                           const Verdict& verdict, Format format);
std::string render_greedy(const Instance& inst, const GreedyResult& result, const Verdict& tefx,
                          Format format);
std::string render_cake(const CakeOutcome& outcome, Format format);
std::string render_frobenius(const std::vector<Count>& sizes, Count target,
                             const std::optional<Decomposition>& decomposition, Format format);

}  // namespace fairdiv
