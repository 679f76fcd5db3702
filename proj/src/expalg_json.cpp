#include <string>

#include "todaq/error.hpp"
#include "todaq/serialize.hpp"

namespace todaq {

Json to_json(const LinForm& l) {
  Json j = Json::object();
  for (const auto& [v, q] : l.coeffs()) j[to_string(v)] = to_string(q);
  return j;
}

Json to_json(const CoefPoly& c) {
  Json arr = Json::array();
  for (const auto& [m, q] : c.terms()) {
    Json g = Json::object();
    for (auto [i, e] : m.exponents()) g[std::to_string(i)] = e;
    arr.push_back({{"q", to_string(q)}, {"g", g}});
  }
  return arr;
}

Json to_json(const ExpPoly& f) {
  Json terms = Json::array();
  for (const auto& [l, c] : f.terms()) terms.push_back({{"coef", to_json(c)}, {"exp", to_json(l)}});
  return {{"terms", terms}};
}

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw ParseError(what + " at " + where, 0);
}

Rational rational_field(const Json& j, const std::string& where) {
  if (!j.is_string()) schema_error(where, "expected rational string");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const ParseError& e) {
    schema_error(where, e.what());
  }
}

CoefPoly coefpoly_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected coefficient array");
  CoefPoly c;
  for (std::size_t k = 0; k < j.size(); ++k) {
    std::string w = where + "/" + std::to_string(k);
    const Json& t = j[k];
    if (!t.is_object() || !t.contains("q")) schema_error(w, "expected {\"q\", \"g\"} object");
    Rational q = rational_field(t["q"], w + "/q");
    std::map<CouplingIndex, int> exps;
    if (t.contains("g")) {
      if (!t["g"].is_object()) schema_error(w + "/g", "expected object");
      for (const auto& [key, val] : t["g"].items()) {
        if (!val.is_number_integer() || val.get<long>() < 0) {
          schema_error(w + "/g/" + key, "expected non-negative integer exponent");
        }
        int idx = 0;
        try {
          std::size_t used = 0;
          idx = std::stoi(key, &used);
          if (used != key.size() || idx < 0) throw std::invalid_argument(key);
        } catch (const std::logic_error&) {
          schema_error(w + "/g/" + key, "expected coupling index");
        }
        exps[idx] += val.get<int>();
      }
    }
    c.add_term(GMonomial(exps), q);
  }
  return c;
}

LinForm linform_at(const Json& j, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected exponent object");
  LinForm l;
  for (const auto& [key, val] : j.items()) {
    VarId v;
    try {
      v = parse_var(key);
    } catch (const ParseError& e) {
      schema_error(where + "/" + key, e.what());
    }
    l.add(v, rational_field(val, where + "/" + key));
  }
  return l;
}

}  // namespace

LinForm linform_from_json(const Json& j) { return linform_at(j, ""); }

ExpPoly exppoly_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array()) {
    schema_error("/", "expected {\"terms\": [...]}");
  }
  ExpPoly f;
  const Json& terms = j["terms"];
  for (std::size_t k = 0; k < terms.size(); ++k) {
    std::string w = "/terms/" + std::to_string(k);
    const Json& t = terms[k];
    if (!t.is_object() || !t.contains("coef") || !t.contains("exp")) {
      schema_error(w, "expected {\"coef\", \"exp\"} object");
    }
    f.add_term(linform_at(t["exp"], w + "/exp"), coefpoly_from_json(t["coef"], w + "/coef"));
  }
  return f;
}

std::string serialize(const ExpPoly& f) { return to_json(f).dump(); }

ExpPoly parse_exppoly(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
  return exppoly_from_json(j);
}

}  // namespace todaq
