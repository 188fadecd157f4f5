// Command-line front end. Exit status: 0 when the requested fairness property
// is verified, 2 when a result is produced but the property or condition does
// not hold, 1 on any error.
#include <iostream>

#include <CLI11.hpp>

#include "fairdiv/cake.hpp"
#include "fairdiv/conditions.hpp"
#include "fairdiv/experiment.hpp"
#include "fairdiv/frobenius.hpp"
#include "fairdiv/greedy.hpp"
#include "fairdiv/io.hpp"
#include "fairdiv/pipeline.hpp"
#include "fairdiv/report.hpp"

using namespace fairdiv;

namespace {

constexpr int kVerified = 0;
constexpr int kError = 1;
constexpr int kNotVerified = 2;

int status(bool ok) { return ok ? kVerified : kNotVerified; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Envy-free and proportional allocation of goods and chores"};
  app.require_subcommand(1);

  std::string input;
  std::string format_name = "human";
  std::string notion_name = "ef";
  bool force = false;
  std::vector<Count> sizes;
  Count target = 0;
  ExperimentConfig config;
  std::string kind_name = "goods";
  std::string target_name = "PROP_ALLOCATION";

  const std::vector<std::string> formats{"human", "json", "csv"};
  auto add_common = [&](CLI::App* sub, bool needs_input) {
    if (needs_input) sub->add_option("--input", input, "Input JSON file")->required();
    sub->add_option("--format", format_name, "Output format")->check(CLI::IsMember(formats));
  };

  auto* allocate = app.add_subcommand("allocate", "Compute and verify an envy-free allocation");
  add_common(allocate, true);
  allocate->add_flag("--force", force, "Run even when the copy counts break the rounding precondition");

  auto* check = app.add_subcommand("check", "Evaluate the sufficient condition for a fairness notion");
  add_common(check, true);
  check->add_option("--notion", notion_name, "ef, prop or tefx");

  auto* mu = app.add_subcommand("mu-bound", "Copies per type that guarantee an envy-free allocation");
  add_common(mu, true);

  auto* verify_cmd = app.add_subcommand("verify", "Check the allocation stored in the input file");
  add_common(verify_cmd, true);
  verify_cmd->add_option("--notion", notion_name, "ef, strong-ef, prop, strong-prop, tefx or efx");

  auto* frob = app.add_subcommand("frobenius", "Write a count as a combination of group sizes");
  add_common(frob, false);
  frob->add_option("--sizes", sizes, "Group sizes")->required()->delimiter(',');
  frob->add_option("--k", target, "Count to represent")->required();

  auto* cake = app.add_subcommand("cake", "Divide a cake with piecewise-linear densities");
  add_common(cake, true);

  auto* greedy = app.add_subcommand("greedy", "Greedy allocation for nearly identical agents");
  add_common(greedy, true);

  auto* exp = app.add_subcommand("experiment", "Repeated trials on uniformly random instances");
  add_common(exp, false);
  exp->add_option("--n", config.n, "Agents");
  exp->add_option("--m", config.m, "Items");
  exp->add_option("--trials", config.trials, "Number of trials");
  exp->add_option("--seed", config.seed, "Base seed");
  exp->add_option("--kind", kind_name, "goods or chores");
  exp->add_option("--target", target_name,
                  "PROP_CONDITION, PROP_ALLOCATION, CHI2_BOUND or CHORES_PENALTY_BOUND");
  exp->add_option("--threads", config.threads, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kError;
  }

  try {
    const Format format = parse_format(format_name);
    if (*allocate) {
      const Instance inst = parse_instance(read_file(input));
      const PipelineResult result = pipeline_allocate(inst, force);
      std::cout << render_pipeline(inst, result, format);
      return status(result.envy_free.holds);
    }
    if (*check) {
      const Instance inst = parse_instance(read_file(input));
      const Notion notion = parse_notion(notion_name);
      ConditionReport r;
      if (notion == Notion::EF || notion == Notion::StrongEF) {
        r = ef_condition(inst);
      } else if (notion == Notion::Prop || notion == Notion::StrongProp) {
        r = prop_condition(inst);
      } else if (notion == Notion::TEFX) {
        r = tefx_condition(inst);
      } else {
        throw FairDivisionError(ErrorKind::UnsupportedScope, "no sufficient condition for EFX");
      }
      std::cout << render_condition(r, format);
      return status(r.satisfied);
    }
    if (*mu) {
      const Instance inst = parse_instance(read_file(input));
      const ConditionReport r = mu_bound(inst);
      std::cout << render_condition(r, format);
      return status(r.mu_bound.has_value());
    }
    if (*verify_cmd) {
      const std::string text = read_file(input);
      const Instance inst = parse_instance(text);
      const auto alloc = parse_allocation(text, inst);
      if (!alloc) throw FairDivisionError(ErrorKind::InvalidInput, "input has no 'allocation' field");
      const Notion notion = parse_notion(notion_name);
      const Verdict v = verify(inst, *alloc, notion);
      std::cout << render_verdict(inst, *alloc, notion, v, format);
      return status(v.holds);
    }
    if (*frob) {
      const auto dec = decompose(sizes, target);
      std::cout << render_frobenius(sizes, target, dec, format);
      return status(dec.has_value());
    }
    if (*cake) {
      const DensitySpec spec = parse_densities(read_file(input));
      const CakeOutcome outcome = run_protocol(spec.agents, spec.options);
      std::cout << render_cake(outcome, format);
      return status(outcome.strong_ef.holds);
    }
    if (*greedy) {
      const Instance inst = parse_instance(read_file(input));
      const GreedyResult result = greedy_allocate(inst);
      const Verdict v = verify(inst, result.allocation, Notion::TEFX);
      std::cout << render_greedy(inst, result, v, format);
      return status(v.holds);
    }
    if (*exp) {
      config.kind = parse_kind(kind_name);
      config.target = parse_target(target_name);
      const ExperimentReport report = run_experiment(config);
      std::cout << emit_report(report, format);
      return status(report.successes == config.trials);
    }
  } catch (const FairDivisionError& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
