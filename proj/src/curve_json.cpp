#include "anytime_ville/curve_json.hpp"

#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "anytime_ville/errors.hpp"
#include "json.hpp"

namespace av {

namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double number(const json& params, const char* key) {
  if (!params.contains(key)) {
    throw ParseError(std::string("missing parameter '") + key + "'");
  }
  const json& v = params.at(key);
  if (!v.is_number()) {
    throw ParseError(std::string("parameter '") + key + "' must be a number");
  }
  return v.get<double>();
}

double number_or(const json& params, const char* key, double fallback) {
  return params.contains(key) ? number(params, key) : fallback;
}

const json& params_of(const json& node) {
  if (!node.is_object() || !node.contains("kind") || !node.at("kind").is_string()) {
    throw ParseError("curve JSON must be an object with a string 'kind'");
  }
  static const json empty = json::object();
  if (!node.contains("params")) return empty;
  const json& p = node.at("params");
  if (!p.is_object()) throw ParseError("'params' must be an object");
  return p;
}

Dampener dampener_from(const json& node) {
  const json& p = params_of(node);
  const auto kind = node.at("kind").get<std::string>();
  const double a = number(p, "a");
  const double b = number(p, "b");
  const double c = number(p, "c");
  if (kind == "Polynomial") return Dampener::polynomial(a, b, c);
  if (kind == "FatTail") return Dampener::fat_tail(a, b, c);
  throw ParseError("unknown dampener kind '" + kind + "'");
}

json dampener_json(const Dampener& h) {
  return {{"kind", h.kind() == Dampener::Kind::Polynomial ? "Polynomial" : "FatTail"},
          {"params", {{"a", h.a()}, {"b", h.b()}, {"c", h.c()}}}};
}

Curve curve_from(const json& node) {
  const json& p = params_of(node);
  const auto kind = node.at("kind").get<std::string>();
  if (kind == "Constant") return Curve::constant(number(p, "c"));
  if (kind == "LogFloor") {
    return Curve::log_floor(number(p, "scale"), number_or(p, "offset", 0.0));
  }
  if (kind == "QuadraticThreshold") {
    if (!p.contains("base")) throw ParseError("missing parameter 'base'");
    return Curve::quadratic_threshold(number(p, "a"), number(p, "b"),
                                      curve_from(p.at("base")));
  }
  if (kind == "ExpConcaveThreshold") {
    if (!p.contains("h")) throw ParseError("missing parameter 'h'");
    if (!p.contains("base")) throw ParseError("missing parameter 'base'");
    return Curve::exp_concave_threshold(dampener_from(p.at("h")), curve_from(p.at("base")));
  }
  if (kind == "LilThreshold") return Curve::lil_threshold(number(p, "d"));
  if (kind == "Tabulated") {
    const bool extend = p.value("extend_constant", false);
    if (p.contains("csv")) return tabulated_from_csv(p.at("csv").get<std::string>(), extend);
    if (!p.contains("points") || !p.at("points").is_array()) {
      throw ParseError("Tabulated needs 'points' or 'csv'");
    }
    std::vector<std::pair<double, double>> pts;
    for (const json& row : p.at("points")) {
      if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
        throw ParseError("Tabulated points must be [x, value] pairs");
      }
      pts.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    return Curve::tabulated(std::move(pts), extend);
  }
  throw ParseError("unknown curve kind '" + kind + "'");
}

json curve_json(const Curve& curve) {
  return std::visit(
      Overloaded{
          [](const Curve::Constant& c) -> json {
            return {{"kind", "Constant"}, {"params", {{"c", c.c}}}};
          },
          [](const Curve::LogFloor& l) -> json {
            return {{"kind", "LogFloor"},
                    {"params", {{"scale", l.scale}, {"offset", l.offset}}}};
          },
          [](const Curve::QuadraticThreshold& q) -> json {
            return {{"kind", "QuadraticThreshold"},
                    {"params", {{"a", q.a}, {"b", q.b}, {"base", curve_json(*q.base)}}}};
          },
          [](const Curve::ExpConcaveThreshold& e) -> json {
            return {{"kind", "ExpConcaveThreshold"},
                    {"params", {{"h", dampener_json(e.h)}, {"base", curve_json(*e.base)}}}};
          },
          [](const Curve::LilThreshold& l) -> json {
            return {{"kind", "LilThreshold"}, {"params", {{"d", l.d}}}};
          },
          [](const Curve::Tabulated& t) -> json {
            json pts = json::array();
            for (std::size_t i = 0; i < t.x.size(); ++i) pts.push_back({t.x[i], t.value[i]});
            return {{"kind", "Tabulated"},
                    {"params", {{"points", pts}, {"extend_constant", t.extend_constant}}}};
          },
      },
      curve.family());
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

Curve curve_from_json(std::string_view text) {
  try {
    return curve_from(parse(text));
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
}

std::string curve_to_json(const Curve& curve) { return curve_json(curve).dump(); }

Dampener dampener_from_json(std::string_view text) {
  try {
    return dampener_from(parse(text));
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
}

std::string dampener_to_json(const Dampener& h) { return dampener_json(h).dump(); }

Curve tabulated_from_csv(const std::string& path, bool extend_constant) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open tabulated curve CSV '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,value") {
    throw ParseError("CSV '" + path + "' must start with header 'x,value'");
  }
  std::vector<std::pair<double, double>> pts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected 'x,value'");
    }
    try {
      std::size_t used = 0;
      const double x = std::stod(line.substr(0, comma), &used);
      const double v = std::stod(line.substr(comma + 1));
      pts.emplace_back(x, v);
    } catch (const std::logic_error&) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  return Curve::tabulated(std::move(pts), extend_constant);
}

}  // namespace av
