#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "fairdiv/io.hpp"
#include "fairdiv/report.hpp"

namespace fairdiv {

namespace {

using Json = nlohmann::ordered_json;

std::string real_str(Real x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.21Lg", x);
  return buf;
}

Real real_from(const Json& v) {
  if (v.is_number()) return v.get<double>();
  const std::string s = v.get<std::string>();
  return std::strtold(s.c_str(), nullptr);
}

// Sorted row of each input group and the reverse map.
Index input_position(const Instance& inst, Index row) {
  const auto& order = inst.group_order();
  for (size_t g = 0; g < order.size(); ++g)
    if (order[g] == row) return static_cast<Index>(g);
  return row;
}

Json allocation_json(const Instance& inst, const IntegralAllocation& alloc) {
  Json rows = Json::array();
  for (Index row : inst.group_order()) {
    Json r = Json::array();
    for (Index z = 0; z < alloc.counts.cols(); ++z) r.push_back(alloc.counts(row, z));
    rows.push_back(r);
  }
  return rows;
}

Json gaps_json(const Instance& inst, const GapReport& gaps) {
  Json out;
  out["min_gap"] = to_string(gaps.min_gap);
  Json m = Json::array();
  for (Index a : inst.group_order()) {
    Json r = Json::array();
    for (Index b : inst.group_order()) r.push_back(to_string(gaps.pair_gaps(a, b)));
    m.push_back(r);
  }
  out["pairwise"] = m;
  if (gaps.argmin_row >= 0) {
    out["argmin"] = {input_position(inst, gaps.argmin_row), input_position(inst, gaps.argmin_col)};
  }
  return out;
}

Json condition_json(const ConditionReport& r) {
  Json out;
  out["condition"] = r.condition;
  out["lhs"] = real_str(r.lhs);
  out["threshold"] = real_str(r.threshold);
  out["direction"] = r.direction == Direction::AtMost ? "at_most" : "at_least";
  out["satisfied"] = r.satisfied;
  out["strict"] = r.strict;
  out["margin"] = real_str(r.margin);
  out["vacuous"] = r.vacuous;
  if (r.mu_bound) out["mu_bound"] = *r.mu_bound;
  if (r.mu_raw != 0) out["mu_raw"] = real_str(r.mu_raw);
  if (r.unbounded) out["unbounded"] = true;
  if (r.log_term_negative) out["log_term_negative"] = true;
  out["n"] = r.n;
  out["d"] = r.d;
  out["t"] = r.t;
  out["g"] = r.g;
  out["theta"] = r.theta;
  out["separation"] = real_str(r.separation);
  out["lambda"] = real_str(r.lambda);
  out["copies_ok"] = r.copies_ok;
  return out;
}

Json verdict_json(const Instance* inst, const Verdict& v) {
  Json out;
  out["holds"] = v.holds;
  if (v.witness) {
    const Witness& w = *v.witness;
    Json wj;
    wj["agent"] = inst && w.agent >= 0 ? input_position(*inst, w.agent) : w.agent;
    if (w.other >= 0) wj["other"] = inst ? input_position(*inst, w.other) : w.other;
    if (w.item >= 0) wj["item"] = w.item;
    out["witness"] = wj;
  }
  return out;
}

std::string verdict_line(const Instance* inst, const Verdict& v) {
  if (v.holds) return "holds";
  std::string s = "fails";
  if (v.witness) {
    const Witness& w = *v.witness;
    auto pos = [&](Index i) { return inst ? input_position(*inst, i) : i; };
    s += " (agent " + std::to_string(pos(w.agent));
    if (w.other >= 0) s += ", other " + std::to_string(pos(w.other));
    if (w.item >= 0) s += ", item " + std::to_string(w.item);
    s += ")";
  }
  return s;
}

std::string human_condition(const ConditionReport& r) {
  std::ostringstream os;
  os << "condition " << r.condition << ": " << (r.satisfied ? "satisfied" : "not satisfied");
  if (r.vacuous) os << " (vacuous)";
  os << "\n  lhs " << real_str(r.lhs) << (r.direction == Direction::AtMost ? " <= " : " >= ")
     << real_str(r.threshold) << ", margin " << real_str(r.margin) << "\n";
  if (r.mu_bound) os << "  copies needed per type: " << *r.mu_bound << "\n";
  if (r.unbounded) os << "  no finite copy bound (rows not separated)\n";
  if (r.log_term_negative) os << "  note: logarithmic term is negative\n";
  os << "  n " << r.n << ", d " << r.d << ", t " << r.t << ", g " << r.g << ", theta " << r.theta
     << ", copies ok " << (r.copies_ok ? "yes" : "no") << "\n";
  return os.str();
}

std::string human_allocation(const Instance& inst, const IntegralAllocation& alloc) {
  std::ostringstream os;
  for (size_t g = 0; g < inst.group_order().size(); ++g) {
    const Index row = inst.group_order()[g];
    os << "  group " << g << " (size " << inst.size(row) << "):";
    for (Index z = 0; z < alloc.counts.cols(); ++z) os << ' ' << alloc.counts(row, z);
    os << "\n";
  }
  return os.str();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "human") return Format::Human;
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  throw FairDivisionError(ErrorKind::InvalidInput, "unknown format '" + std::string(name) + "'");
}

std::string emit_report(const ExperimentReport& report, Format format) {
  const ExperimentConfig& c = report.config;
  if (format == Format::Csv) {
    std::ostringstream os;
    os << "trial,seed,success," << csv_escape(report.quantity_name) << ",reference\n";
    for (const auto& t : report.trials)
      os << t.index << ',' << t.seed << ',' << (t.success ? 1 : 0) << ',' << real_str(t.quantity)
         << ',' << real_str(t.reference) << "\n";
    return os.str();
  }
  if (format == Format::Json) {
    Json doc;
    doc["schema_version"] = report_schema_version;
    doc["config"] = {{"n", c.n},
                     {"m", c.m},
                     {"trials", c.trials},
                     {"seed", c.seed},
                     {"kind", to_string(c.kind)},
                     {"target", to_string(c.target)}};
    doc["quantity_name"] = report.quantity_name;
    doc["successes"] = report.successes;
    doc["success_fraction"] = to_string(report.success_fraction);
    doc["min_quantity"] = real_str(report.min_quantity);
    doc["median_quantity"] = real_str(report.median_quantity);
    Json trials = Json::array();
    for (const auto& t : report.trials)
      trials.push_back({{"index", t.index},
                        {"seed", t.seed},
                        {"success", t.success},
                        {"quantity", real_str(t.quantity)},
                        {"reference", real_str(t.reference)}});
    doc["trials"] = trials;
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "experiment " << to_string(c.target) << " (" << to_string(c.kind) << ", n " << c.n
     << ", m " << c.m << ", trials " << c.trials << ", seed " << c.seed << ")\n";
  os << "successes: " << report.successes << "/" << c.trials << " ("
     << real_str(to_real(report.success_fraction)) << ")\n";
  os << report.quantity_name << ": min " << real_str(report.min_quantity) << ", median "
     << real_str(report.median_quantity) << "\n";
  if (!report.trials.empty()) os << "reference: " << real_str(report.trials.front().reference) << "\n";
  return os.str();
}

ExperimentReport parse_report_json(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::exception& e) {
    throw FairDivisionError(ErrorKind::InvalidInput, std::string("report: ") + e.what());
  }
  try {
    if (doc.at("schema_version").get<int>() != report_schema_version)
      throw FairDivisionError(ErrorKind::InvalidInput, "report: unsupported schema version");
    ExperimentReport r;
    const Json& c = doc.at("config");
    r.config.n = c.at("n").get<Count>();
    r.config.m = c.at("m").get<Count>();
    r.config.trials = c.at("trials").get<Count>();
    r.config.seed = c.at("seed").get<std::uint64_t>();
    r.config.kind = parse_kind(c.at("kind").get<std::string>());
    r.config.target = parse_target(c.at("target").get<std::string>());
    r.quantity_name = doc.at("quantity_name").get<std::string>();
    r.successes = doc.at("successes").get<Count>();
    r.success_fraction = parse_rational(doc.at("success_fraction").get<std::string>());
    r.min_quantity = real_from(doc.at("min_quantity"));
    r.median_quantity = real_from(doc.at("median_quantity"));
    for (const Json& t : doc.at("trials")) {
      TrialOutcome o;
      o.index = t.at("index").get<Count>();
      o.seed = t.at("seed").get<std::uint64_t>();
      o.success = t.at("success").get<bool>();
      o.quantity = real_from(t.at("quantity"));
      o.reference = real_from(t.at("reference"));
      r.trials.push_back(o);
    }
    return r;
  } catch (const Json::exception& e) {
    throw FairDivisionError(ErrorKind::InvalidInput, std::string("report: ") + e.what());
  }
}

std::string render_condition(const ConditionReport& report, Format format) {
  if (format == Format::Json) return condition_json(report).dump(2) + "\n";
  if (format == Format::Csv) {
    return "condition,lhs,threshold,satisfied,mu_bound\n" + report.condition + "," +
           real_str(report.lhs) + "," + real_str(report.threshold) + "," +
           (report.satisfied ? "1" : "0") + "," +
           (report.mu_bound ? std::to_string(*report.mu_bound) : "") + "\n";
  }
  return human_condition(report);
}

std::string render_pipeline(const Instance& inst, const PipelineResult& result, Format format) {
  if (format == Format::Json) {
    Json doc;
    doc["allocation"] = allocation_json(inst, result.allocation);
    doc["gaps"] = gaps_json(inst, result.gaps);
    if (result.condition) doc["condition"] = condition_json(*result.condition);
    doc["lp_min_gap"] = real_str(result.lp.objective_value);
    doc["lp_certified"] = result.lp.certified();
    doc["mechanism_min_gap"] = real_str(result.mechanism_min_gap);
    doc["pooled_mass"] = result.trace.pooled_mass;
    doc["pooled_bound"] = result.trace.adjusted_constant;
    doc["envy_free"] = verdict_json(&inst, result.envy_free);
    doc["strongly_envy_free"] = verdict_json(&inst, result.strongly_envy_free);
    return doc.dump(2) + "\n";
  }
  if (format == Format::Csv) {
    std::ostringstream os;
    os << "group,size";
    for (Index z = 0; z < inst.types(); ++z) os << ",type" << z;
    os << "\n";
    for (size_t g = 0; g < inst.group_order().size(); ++g) {
      const Index row = inst.group_order()[g];
      os << g << ',' << inst.size(row);
      for (Index z = 0; z < inst.types(); ++z) os << ',' << result.allocation.counts(row, z);
      os << "\n";
    }
    return os.str();
  }
  std::ostringstream os;
  os << "allocation (copies per agent):\n" << human_allocation(inst, result.allocation);
  os << "min gap: " << to_string(result.gaps.min_gap) << "\n";
  os << "LP min gap (normalized): " << real_str(result.lp.objective_value) << "\n";
  os << "pooled mass: " << result.trace.pooled_mass << " (bound " << result.trace.adjusted_constant
     << ")\n";
  if (result.condition) os << human_condition(*result.condition);
  os << "envy-free: " << verdict_line(&inst, result.envy_free) << "\n";
  os << "strongly envy-free: " << verdict_line(&inst, result.strongly_envy_free) << "\n";
  return os.str();
}

std::string render_verdict(const Instance& inst, const IntegralAllocation& alloc, Notion notion,
                           const Verdict& verdict, Format format) {
  if (format == Format::Json) {
    Json doc;
    doc["notion"] = to_string(notion);
    doc["verdict"] = verdict_json(&inst, verdict);
    doc["gaps"] = gaps_json(inst, gap_report(inst, alloc));
    return doc.dump(2) + "\n";
  }
  if (format == Format::Csv)
    return std::string("notion,holds\n") + to_string(notion) + "," + (verdict.holds ? "1" : "0") + "\n";
  return std::string(to_string(notion)) + ": " + verdict_line(&inst, verdict) + "\n";
}

std::string render_greedy(const Instance& inst, const GreedyResult& result, const Verdict& tefx,
                          Format format) {
  const Index n = inst.groups();
  std::vector<std::vector<Index>> bundles(static_cast<size_t>(n));
  for (Index z = 0; z < inst.types(); ++z)
    for (Index i = 0; i < n; ++i)
      if (result.allocation.counts(i, z) > 0)
        bundles[static_cast<size_t>(input_position(inst, i))].push_back(z);
  if (format == Format::Json) {
    Json doc;
    doc["bundles"] = bundles;
    Json recipients = Json::array();
    for (Index r : result.trace.recipients) recipients.push_back(input_position(inst, r));
    doc["order"] = result.trace.order;
    doc["recipients"] = recipients;
    doc["tefx"] = verdict_json(&inst, tefx);
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  if (format == Format::Csv) {
    os << "step,item,agent\n";
    for (size_t s = 0; s < result.trace.order.size(); ++s)
      os << s << ',' << result.trace.order[s] << ','
         << input_position(inst, result.trace.recipients[s]) << "\n";
    return os.str();
  }
  for (size_t a = 0; a < bundles.size(); ++a) {
    os << "agent " << a << ":";
    for (Index z : bundles[a]) os << ' ' << z;
    os << "\n";
  }
  os << "tEFX: " << verdict_line(&inst, tefx) << "\n";
  return os.str();
}

std::string render_cake(const CakeOutcome& outcome, Format format) {
  if (format == Format::Json) {
    Json doc;
    doc["pieces"] = outcome.pieces;
    doc["piece_owner"] = outcome.piece_owner;
    doc["eval_queries"] = outcome.meter.eval_count;
    doc["cut_queries"] = outcome.meter.cut_count;
    if (outcome.epsilon) {
      doc["epsilon"] = real_str(outcome.epsilon->epsilon);
      doc["query_budget"] = outcome.epsilon->query_budget;
    }
    doc["lipschitz"] = real_str(outcome.lipschitz);
    doc["measured_delta"] = real_str(outcome.measured_delta);
    doc["delta"] = real_str(outcome.delta);
    doc["preconditions_ok"] = outcome.preconditions_ok;
    doc["condition"] = condition_json(outcome.condition);
    doc["strong_ef"] = verdict_json(nullptr, outcome.strong_ef);
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  if (format == Format::Csv) {
    os << "piece,owner\n";
    for (size_t p = 0; p < outcome.piece_owner.size(); ++p) os << p << ',' << outcome.piece_owner[p] << "\n";
    return os.str();
  }
  os << "pieces: " << outcome.pieces << " (eval queries " << outcome.meter.eval_count
     << ", cut queries " << outcome.meter.cut_count << ")\n";
  for (Index a = 0; a < static_cast<Index>(outcome.piece_values.rows()); ++a) {
    os << "agent " << a << ":";
    for (size_t p = 0; p < outcome.piece_owner.size(); ++p)
      if (outcome.piece_owner[p] == a) os << ' ' << p;
    os << "\n";
  }
  os << "lipschitz " << real_str(outcome.lipschitz) << ", delta " << real_str(outcome.delta)
     << ", preconditions " << (outcome.preconditions_ok ? "ok" : "not met") << "\n";
  os << human_condition(outcome.condition);
  os << "strongly envy-free: " << verdict_line(nullptr, outcome.strong_ef) << "\n";
  return os.str();
}

std::string render_frobenius(const std::vector<Count>& sizes, Count target,
                             const std::optional<Decomposition>& decomposition, Format format) {
  const Thresholds th = thresholds(sizes);
  if (format == Format::Json) {
    Json doc;
    doc["sizes"] = sizes;
    doc["target"] = target;
    doc["g"] = th.g;
    doc["theta"] = th.theta;
    doc["representable"] = decomposition.has_value();
    if (decomposition) doc["coefficients"] = decomposition->coefficients;
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  if (format == Format::Csv) {
    os << "target,representable";
    for (size_t i = 0; i < sizes.size(); ++i) os << ",x" << i;
    os << "\n" << target << ',' << (decomposition ? 1 : 0);
    for (size_t i = 0; i < sizes.size(); ++i)
      os << ',' << (decomposition ? std::to_string(decomposition->coefficients[i]) : "");
    os << "\n";
    return os.str();
  }
  os << "g " << th.g << ", theta " << th.theta << "\n";
  if (!decomposition) {
    os << target << " is not representable\n";
  } else {
    os << target << " =";
    for (size_t i = 0; i < sizes.size(); ++i)
      os << (i ? " + " : " ") << decomposition->coefficients[i] << "*" << sizes[i];
    os << "\n";
  }
  return os.str();
}

}  // namespace fairdiv
