#include "stoprule/instance_io.hpp"

#include <fstream>

#include "stoprule/errors.hpp"

namespace stoprule {
namespace {

using nlohmann::json;

std::string where(std::size_t index) { return "distribution " + std::to_string(index) + ": "; }

double number(const json& obj, const char* key, std::size_t index) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number())
    throw ValidationError(where(index) + "missing numeric field '" + key + "'");
  return it->get<double>();
}

int integer(const json& obj, const char* key, std::size_t index) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer())
    throw ValidationError(where(index) + "missing integer field '" + key + "'");
  return it->get<int>();
}

std::vector<std::pair<double, double>> pairs(const json& obj, const char* key, std::size_t index) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_array())
    throw ValidationError(where(index) + "missing array field '" + key + "'");
  std::vector<std::pair<double, double>> out;
  for (const auto& item : *it) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number())
      throw ValidationError(where(index) + "'" + key + "' entries must be [number, number] pairs");
    out.emplace_back(item[0].get<double>(), item[1].get<double>());
  }
  return out;
}

Distribution parse_distribution(const json& obj, std::size_t index) {
  if (!obj.is_object()) throw ValidationError(where(index) + "expected an object");
  auto kind_it = obj.find("kind");
  if (kind_it == obj.end() || !kind_it->is_string()) throw ValidationError(where(index) + "missing 'kind'");
  const auto kind = kind_it->get<std::string>();

  if (kind == "uniform") return Distribution::uniform(number(obj, "low", index), number(obj, "high", index));
  if (kind == "two_point")
    return Distribution::two_point(number(obj, "low_value", index), number(obj, "high_value", index),
                                   number(obj, "p_high", index));
  if (kind == "piecewise_linear_cdf") {
    std::vector<Knot> knots;
    for (auto [x, f] : pairs(obj, "knots", index)) knots.push_back({x, f});
    return Distribution::piecewise_linear(std::move(knots));
  }
  if (kind == "extremal_component")
    return Distribution::extremal_component(integer(obj, "n", index), integer(obj, "index", index));
  if (kind == "point_mass") return Distribution::point_mass(number(obj, "value", index));
  if (kind == "discrete") {
    std::vector<Atom> atoms;
    for (auto [v, p] : pairs(obj, "atoms", index)) atoms.push_back({v, p});
    return Distribution::discrete(std::move(atoms));
  }
  throw ValidationError(where(index) + "unknown kind '" + kind + "'");
}

}  // namespace

ProblemInstance instance_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("instance document must be a JSON object");
  auto it = doc.find("distributions");
  if (it == doc.end() || !it->is_array()) throw ValidationError("instance needs a 'distributions' array");
  std::vector<Distribution> ds;
  ds.reserve(it->size());
  for (std::size_t i = 0; i < it->size(); ++i) ds.push_back(parse_distribution((*it)[i], i));
  return ProblemInstance(std::move(ds));
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open instance file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("instance file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return instance_from_json(doc);
}

json to_json(const Distribution& d) {
  struct Visitor {
    json operator()(const UniformLaw& u) const { return {{"kind", "uniform"}, {"low", u.low}, {"high", u.high}}; }
    json operator()(const TwoPointLaw& t) const {
      return {{"kind", "two_point"}, {"low_value", t.low_value}, {"high_value", t.high_value}, {"p_high", t.p_high}};
    }
    json operator()(const PiecewiseLinearLaw& p) const {
      json knots = json::array();
      for (const auto& k : p.knots) knots.push_back({k.x, k.cdf});
      return {{"kind", "piecewise_linear_cdf"}, {"knots", knots}};
    }
    json operator()(const ExtremalComponentLaw& e) const {
      return {{"kind", "extremal_component"}, {"n", e.n}, {"index", e.index}};
    }
    json operator()(const PointMassLaw& m) const { return {{"kind", "point_mass"}, {"value", m.value}}; }
    json operator()(const DiscreteLaw& d) const {
      json atoms = json::array();
      for (const auto& a : d.atoms) atoms.push_back({a.value, a.prob});
      return {{"kind", "discrete"}, {"atoms", atoms}};
    }
  };
  return std::visit(Visitor{}, d.law());
}

json to_json(const ProblemInstance& instance) {
  json arr = json::array();
  for (const auto& d : instance) arr.push_back(to_json(d));
  return {{"distributions", arr}};
}

}  // namespace stoprule
