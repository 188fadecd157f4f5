#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fairdiv/io.hpp"

namespace fairdiv {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw FairDivisionError(ErrorKind::InvalidInput, where + ": " + what);
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number.
    size_t line = 1;
    for (size_t i = 0; i < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    bad("line " + std::to_string(line), "malformed JSON");
  }
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) bad(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) bad(where, std::string("missing field '") + key + "'");
  return *it;
}

Count count_at(const json& v, const std::string& where) {
  if (!v.is_number_integer()) bad(where, "expected an integer");
  const auto c = v.get<long long>();
  if (c < 0) bad(where, "must be nonnegative");
  return c;
}

Rational rational_at(const json& v, const std::string& where) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
  } catch (const FairDivisionError& e) {
    bad(where, e.what());
  }
  bad(where, "expected a rational string such as \"3/4\"");
}

}  // namespace

Instance parse_instance(std::string_view text) {
  const json doc = parse_json(text);
  const json& kind_j = field(doc, "kind", "document");
  if (!kind_j.is_string()) bad("kind", "expected \"goods\" or \"chores\"");
  Kind kind;
  try {
    kind = parse_kind(kind_j.get<std::string>());
  } catch (const FairDivisionError&) {
    bad("kind", "expected \"goods\" or \"chores\"");
  }

  const json& groups = field(doc, "groups", "document");
  if (!groups.is_array() || groups.empty()) bad("groups", "expected a nonempty array");
  std::vector<Count> sizes;
  for (size_t i = 0; i < groups.size(); ++i) {
    const std::string where = "groups[" + std::to_string(i) + "]";
    const Count s = count_at(field(groups[i], "size", where), where + ".size");
    if (s < 1) bad(where + ".size", "must be at least 1");
    sizes.push_back(s);
  }

  const json& types = field(doc, "types", "document");
  if (!types.is_array() || types.empty()) bad("types", "expected a nonempty array");
  std::vector<Count> copies;
  MatrixQ values(static_cast<Index>(sizes.size()), static_cast<Index>(types.size()));
  for (size_t z = 0; z < types.size(); ++z) {
    const std::string where = "types[" + std::to_string(z) + "]";
    const Count k = count_at(field(types[z], "copies", where), where + ".copies");
    if (k < 1) bad(where + ".copies", "must be at least 1");
    copies.push_back(k);
    const json& vals = field(types[z], "values", where);
    if (!vals.is_array() || vals.size() != sizes.size())
      bad(where + ".values", "expected " + std::to_string(sizes.size()) + " values, one per group");
    for (size_t i = 0; i < vals.size(); ++i) {
      const std::string at = where + ".values[" + std::to_string(i) + "]";
      Rational q = rational_at(vals[i], at);
      if (q < 0) bad(at, "values must be nonnegative");
      if (kind == Kind::Chores && q == 0) bad(at, "chore costs must be strictly positive");
      values(static_cast<Index>(i), static_cast<Index>(z)) = q;
    }
  }
  return Instance(std::move(sizes), std::move(copies), std::move(values), kind);
}

std::string serialize_instance(const Instance& inst) {
  json doc;
  doc["kind"] = to_string(inst.kind());
  doc["groups"] = json::array();
  for (Index i = 0; i < inst.groups(); ++i) doc["groups"].push_back({{"size", inst.size(i)}});
  doc["types"] = json::array();
  for (Index z = 0; z < inst.types(); ++z) {
    json vals = json::array();
    for (Index i = 0; i < inst.groups(); ++i) vals.push_back(to_string(inst.value(i, z)));
    doc["types"].push_back({{"copies", inst.copies(z)}, {"values", vals}});
  }
  return doc.dump(2) + "\n";
}

std::optional<IntegralAllocation> parse_allocation(std::string_view text, const Instance& inst) {
  const json doc = parse_json(text);
  auto it = doc.find("allocation");
  if (it == doc.end()) return std::nullopt;
  const json& rows = *it;
  if (!rows.is_array() || static_cast<Index>(rows.size()) != inst.groups())
    bad("allocation", "expected one row per group");
  IntegralAllocation out;
  out.counts.resize(inst.groups(), inst.types());
  for (size_t i = 0; i < rows.size(); ++i) {
    const std::string where = "allocation[" + std::to_string(i) + "]";
    if (!rows[i].is_array() || static_cast<Index>(rows[i].size()) != inst.types())
      bad(where, "expected one count per type");
    const Index row = inst.group_order()[i];
    for (size_t z = 0; z < rows[i].size(); ++z)
      out.counts(row, static_cast<Index>(z)) =
          count_at(rows[i][z], where + "[" + std::to_string(z) + "]");
  }
  return out;
}

DensitySpec parse_densities(std::string_view text) {
  const json doc = parse_json(text);
  const json& agents = field(doc, "agents", "document");
  if (!agents.is_array() || agents.size() < 2) bad("agents", "expected at least two agents");
  DensitySpec spec;
  for (size_t a = 0; a < agents.size(); ++a) {
    const std::string where = "agents[" + std::to_string(a) + "]";
    if (!agents[a].is_array()) bad(where, "expected a list of [breakpoint, value] pairs");
    std::vector<std::pair<Rational, Rational>> points;
    for (size_t p = 0; p < agents[a].size(); ++p) {
      const std::string at = where + "[" + std::to_string(p) + "]";
      const json& pair = agents[a][p];
      if (!pair.is_array() || pair.size() != 2) bad(at, "expected [breakpoint, value]");
      points.emplace_back(rational_at(pair[0], at + "[0]"), rational_at(pair[1], at + "[1]"));
    }
    try {
      spec.agents.emplace_back(points);
    } catch (const FairDivisionError& e) {
      bad(where, e.what());
    }
  }
  if (auto it = doc.find("delta"); it != doc.end()) {
    if (!it->is_number() || it->get<double>() <= 0) bad("delta", "expected a positive number");
    spec.options.delta = it->get<double>();
  }
  if (auto it = doc.find("pieces"); it != doc.end()) {
    const Count p = count_at(*it, "pieces");
    if (p < 1) bad("pieces", "must be at least 1");
    spec.options.pieces = p;
  }
  return spec;
}

Notion parse_notion(std::string_view name) {
  if (name == "ef") return Notion::EF;
  if (name == "strong-ef") return Notion::StrongEF;
  if (name == "prop") return Notion::Prop;
  if (name == "strong-prop") return Notion::StrongProp;
  if (name == "tefx") return Notion::TEFX;
  if (name == "efx") return Notion::EFX;
  throw FairDivisionError(ErrorKind::InvalidInput, "unknown fairness notion '" + std::string(name) + "'");
}

Kind parse_kind(std::string_view name) {
  if (name == "goods") return Kind::Goods;
  if (name == "chores") return Kind::Chores;
  throw FairDivisionError(ErrorKind::InvalidInput, "unknown kind '" + std::string(name) + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FairDivisionError(ErrorKind::InvalidInput, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fairdiv
