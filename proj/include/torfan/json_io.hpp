#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "torfan/coeff.hpp"
#include "torfan/error.hpp"
#include "torfan/fan.hpp"
#include "torfan/fgl.hpp"
#include "torfan/piecewise.hpp"
#include "torfan/series.hpp"
#include "torfan/sr.hpp"

namespace torfan {

using Json = nlohmann::json;

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

inline Int int_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Int(j.get<long long>());
  if (j.is_string()) {
    try {
      return Int(j.get<std::string>());
    } catch (const std::exception&) {
      throw ParseError(where + ": bad integer '" + j.get<std::string>() + "'");
    }
  }
  throw ParseError(where + ": integer expected");
}

inline Json int_to_json(const Int& n) { return Json(n.str()); }

inline Json coeff_to_json(const CoeffElem& c) {
  Json terms = Json::array();
  for (const auto& [exps, a] : c.terms()) {
    Json e = Json::object();
    for (std::size_t i = 0; i < exps.size(); ++i)
      if (exps[i] != 0) e[c.spec()->name(i)] = exps[i];
    terms.push_back(Json{{"exps", e}, {"int", int_to_json(a)}});
  }
  return Json{{"terms", terms}};
}

inline CoeffElem coeff_from_json(const Json& j, const ParamSpecPtr& spec) {
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array())
    throw ParseError("coefficient: object with a 'terms' array expected");
  std::vector<std::pair<CoeffElem::Exps, Int>> terms;
  for (const auto& t : j["terms"]) {
    CoeffElem::Exps exps(spec->size(), 0);
    if (t.contains("exps")) {
      if (!t["exps"].is_object()) throw ParseError("coefficient: 'exps' must be an object");
      for (const auto& [name, e] : t["exps"].items()) {
        auto idx = spec->index_of(name);
        if (!idx) throw ParseError("coefficient: unknown parameter '" + name + "'");
        if (!e.is_number_integer()) throw ParseError("coefficient: exponent must be an integer");
        exps[*idx] = e.get<int>();
      }
    }
    if (!t.contains("int")) throw ParseError("coefficient: term without 'int'");
    terms.emplace_back(std::move(exps), int_from_json(t["int"], "coefficient"));
  }
  return CoeffElem::from_terms(spec, terms);
}

inline Json fan_to_json(const Fan& fan) {
  Json rays = Json::array();
  for (const auto& v : fan.rays()) {
    Json row = Json::array();
    for (const auto& x : v) row.push_back(static_cast<long long>(x));
    rays.push_back(row);
  }
  Json cones = Json::array();
  for (const auto& c : fan.max_cones()) cones.push_back(c);
  return Json{{"dim", fan.dim()},
              {"rays", rays},
              {"max_cones", cones},
              {"labels", fan.labels()}};
}

inline FanData fan_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("fan: object expected");
  for (const char* key : {"dim", "rays", "max_cones"})
    if (!j.contains(key)) throw ParseError(std::string("fan: missing '") + key + "'");
  FanData d;
  if (!j["dim"].is_number_integer()) throw ParseError("fan: 'dim' must be an integer");
  d.dim = j["dim"].get<int>();
  if (!j["rays"].is_array()) throw ParseError("fan: 'rays' must be an array");
  for (const auto& row : j["rays"]) {
    if (!row.is_array()) throw ParseError("fan: each ray must be an array");
    std::vector<Int> v;
    for (const auto& x : row) v.push_back(int_from_json(x, "fan ray"));
    d.rays.push_back(std::move(v));
  }
  if (!j["max_cones"].is_array()) throw ParseError("fan: 'max_cones' must be an array");
  for (const auto& row : j["max_cones"]) {
    if (!row.is_array()) throw ParseError("fan: each cone must be an array");
    Cone c;
    for (const auto& x : row) {
      if (!x.is_number_integer()) throw ParseError("fan: cone entries are ray indices");
      c.push_back(x.get<int>());
    }
    d.max_cones.push_back(std::move(c));
  }
  if (j.contains("labels")) {
    if (!j["labels"].is_array()) throw ParseError("fan: 'labels' must be an array");
    for (const auto& l : j["labels"]) {
      if (!l.is_string()) throw ParseError("fan: labels must be strings");
      d.labels.push_back(l.get<std::string>());
    }
  }
  return d;
}

inline Json series_to_json(const Series& f) {
  Json out = Json::array();
  for (const auto& [m, c] : f.terms()) {
    Json mono = Json::object();
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i] != 0) mono[f.ctx()->labels[i]] = m[i];
    out.push_back(Json{{"monomial", mono}, {"coeff", coeff_to_json(c)}});
  }
  return out;
}

inline Series series_from_json(const Json& j, const SeriesCtxPtr& ctx) {
  if (!j.is_array()) throw ParseError("element: array of terms expected");
  std::vector<std::pair<Mono, CoeffElem>> terms;
  for (const auto& t : j) {
    if (!t.is_object() || !t.contains("monomial") || !t.contains("coeff"))
      throw ParseError("element: each term needs 'monomial' and 'coeff'");
    Mono m(ctx->labels.size(), 0);
    if (!t["monomial"].is_object()) throw ParseError("element: 'monomial' must be an object");
    for (const auto& [label, e] : t["monomial"].items()) {
      auto it = std::find(ctx->labels.begin(), ctx->labels.end(), label);
      if (it == ctx->labels.end())
        throw ParseError("element: unknown variable '" + label + "'");
      if (!e.is_number_integer() || e.get<int>() < 0)
        throw ParseError("element: exponents are nonnegative integers");
      m[it - ctx->labels.begin()] = e.get<int>();
    }
    terms.emplace_back(std::move(m), coeff_from_json(t["coeff"], ctx->params));
  }
  return Series::from_terms(ctx, terms);
}

inline Json presentation_to_json(const Presentation& p) {
  Json rels = Json::array();
  for (const auto& r : p.relations) rels.push_back(series_to_json(r));
  return Json{{"variables", p.ctx->labels}, {"relations", rels}, {"N", p.ctx->trunc}};
}

// Generic law table file: {"N": 6, "a": {"1,1": <coeff>}, "params"?:
// {"names": [...], "invertible": [...]}}. Without 'params' the names are
// collected from the exponent keys, none invertible.
inline FormalGroupLaw fgl_table_from_json(const Json& j, int trunc) {
  if (!j.is_object() || !j.contains("N") || !j.contains("a"))
    throw ParseError("law table: object with 'N' and 'a' expected");
  if (!j["N"].is_number_integer()) throw ParseError("law table: 'N' must be an integer");
  const int file_n = j["N"].get<int>();
  if (file_n < trunc)
    throw ParseError("law table: table truncation " + std::to_string(file_n) +
                     " is below the requested degree " + std::to_string(trunc));
  if (!j["a"].is_object()) throw ParseError("law table: 'a' must be an object");
  ParamSpecPtr spec;
  if (j.contains("params")) {
    const auto& p = j["params"];
    if (!p.is_object() || !p.contains("names"))
      throw ParseError("law table: 'params' needs a 'names' array");
    std::vector<std::string> names, invertible;
    for (const auto& n : p["names"]) names.push_back(n.get<std::string>());
    if (p.contains("invertible"))
      for (const auto& n : p["invertible"]) invertible.push_back(n.get<std::string>());
    spec = ParamSpec::make(std::move(names), std::move(invertible));
  } else {
    std::set<std::string> names;
    for (const auto& [key, cj] : j["a"].items()) {
      (void)key;
      if (cj.is_object() && cj.contains("terms"))
        for (const auto& t : cj["terms"])
          if (t.contains("exps"))
            for (const auto& [name, e] : t["exps"].items()) {
              (void)e;
              names.insert(name);
            }
    }
    spec = ParamSpec::make(std::vector<std::string>(names.begin(), names.end()));
  }
  FormalGroupLaw::Table table;
  for (const auto& [key, cj] : j["a"].items()) {
    auto comma = key.find(',');
    if (comma == std::string::npos)
      throw ParseError("law table: key '" + key + "' is not of the form 'i,j'");
    int i = 0, jj = 0;
    try {
      i = std::stoi(key.substr(0, comma));
      jj = std::stoi(key.substr(comma + 1));
    } catch (const std::exception&) {
      throw ParseError("law table: key '" + key + "' is not of the form 'i,j'");
    }
    table.emplace(std::make_pair(i, jj), coeff_from_json(cj, spec));
  }
  return FormalGroupLaw::generic(spec, trunc, std::move(table));
}

inline Json piecewise_to_json(const PiecewiseFunc& f) {
  Json pieces = Json::array();
  for (std::size_t i = 0; i < f.pieces().size(); ++i) {
    const Cone& cone = f.fan()->max_cone(i);
    Json cone_labels = Json::array();
    for (int r : cone) cone_labels.push_back(f.fan()->label(r));
    Json terms = Json::array();
    for (const auto& [e, c] : f.piece(i)) {
      Json exps = Json::object();
      for (std::size_t p = 0; p < e.size(); ++p)
        if (e[p] != 0) exps[f.fan()->label(cone[p])] = e[p];
      terms.push_back(Json{{"exps", exps}, {"int", int_to_json(c)}});
    }
    pieces.push_back(Json{{"cone", cone_labels}, {"terms", terms}});
  }
  return Json{{"mode", f.mode() == PwMode::polynomial ? "polynomial" : "exponential"},
              {"pieces", pieces}};
}

}  // namespace torfan
