#pragma once

// Textual input: polynomials like `3*x^2*y - 1/2*x*T`, JSON payloads for
// algebras, categories and diagrams, and JSON encodings for reports.
// Every error names the JSON path of the offending field.

#include <cctype>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tatekit/deformation.hpp"
#include "tatekit/diagrams.hpp"
#include "tatekit/errors.hpp"

namespace tatekit::io {

using json = nlohmann::json;

inline constexpr const char* schema_version = "1";

// ---------------------------------------------------------------------------
// Polynomials

class PolyParser {
public:
  PolyParser(const std::string& text, const std::map<std::string, Symbol>& symbols, std::string where)
      : s_(text), symbols_(symbols), where_(std::move(where)) {}

  Poly parse() {
    Poly out;
    skip();
    if (pos_ == s_.size()) fail("empty polynomial");
    bool first = true;
    while (pos_ < s_.size()) {
      Rational sign = 1;
      if (peek() == '+' || peek() == '-') {
        if (peek() == '-') sign = -1;
        ++pos_;
        skip();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      out += term() * sign;
      first = false;
      skip();
    }
    return out;
  }

private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw InputError(where_ + ": " + why + " at column " + std::to_string(pos_ + 1) + " of '" + s_ + "'");
  }

  std::string digits() {
    std::string out;
    while (std::isdigit(static_cast<unsigned char>(peek()))) out += s_[pos_++];
    return out;
  }

  Poly factor() {
    skip();
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      std::string num = digits();
      std::string den = "1";
      skip();
      if (peek() == '/') {
        ++pos_;
        skip();
        den = digits();
        if (den.empty()) fail("expected a denominator");
        if (den.find_first_not_of('0') == std::string::npos) fail("zero denominator");
      }
      Rational q(num + "/" + den);
      q.canonicalize();
      return Poly(q);
    }
    if (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_') {
      std::string name;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '.') name += s_[pos_++];
      auto it = symbols_.find(name);
      if (it == symbols_.end()) fail("unknown variable '" + name + "'");
      int e = 1;
      skip();
      if (peek() == '^') {
        ++pos_;
        skip();
        std::string k = digits();
        if (k.empty()) fail("expected an exponent");
        e = std::stoi(k);
      }
      return Poly::of(it->second, e);
    }
    fail("expected a number or a variable");
  }

  Poly term() {
    Poly out = factor();
    skip();
    while (peek() == '*') {
      ++pos_;
      out = out * factor();
      skip();
    }
    return out;
  }

  std::string s_;
  const std::map<std::string, Symbol>& symbols_;
  std::string where_;
  std::size_t pos_ = 0;
};

inline Poly parse_poly(const std::string& text, const std::vector<Symbol>& symbols, const std::string& where) {
  std::map<std::string, Symbol> table;
  for (const auto& s : symbols) table.emplace(s.name, s);
  return PolyParser(text, table, where).parse();
}

/// Rejects relations whose terms have different weights.
inline void require_homogeneous(const Poly& p, const std::string& text, const std::string& where) {
  int lo = 0, hi = 0;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    lo = first ? m.weight() : std::min(lo, m.weight());
    hi = first ? m.weight() : std::max(hi, m.weight());
    first = false;
  }
  if (lo != hi)
    throw InputError(where + ": relation '" + text + "' is not weight-homogeneous (term weights " +
                     std::to_string(lo) + ".." + std::to_string(hi) + ")");
}

// ---------------------------------------------------------------------------
// JSON payloads

inline const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(where + ": missing field '" + key + "'");
  return *it;
}

inline std::string string_at(const json& j, const std::string& where) {
  if (!j.is_string()) throw InputError(where + ": expected a string");
  return j.get<std::string>();
}

inline int int_at(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw InputError(where + ": expected an integer");
  return j.get<int>();
}

inline const json& array_at(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array");
  return j;
}

/// {vars: [{name, weight}], relations: [string]}
inline AlgebraPtr parse_algebra(const json& j, const std::string& where) {
  std::vector<Symbol> vars;
  const auto& vs = array_at(field(j, "vars", where), where + ".vars");
  for (std::size_t i = 0; i < vs.size(); ++i) {
    std::string at = where + ".vars[" + std::to_string(i) + "]";
    std::string name = string_at(field(vs[i], "name", at), at + ".name");
    int weight = int_at(field(vs[i], "weight", at), at + ".weight");
    if (weight < 1) throw InputError(at + ": weight of '" + name + "' must be positive");
    if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_'))
      throw InputError(at + ": variable name '" + name + "' must start with a letter");
    for (const auto& v : vars)
      if (v.name == name) throw InputError(at + ": duplicate variable '" + name + "'");
    vars.push_back({name, 0, weight});
  }
  std::vector<Poly> rels;
  if (j.contains("relations")) {
    const auto& rs = array_at(j["relations"], where + ".relations");
    for (std::size_t i = 0; i < rs.size(); ++i) {
      std::string at = where + ".relations[" + std::to_string(i) + "]";
      std::string text = string_at(rs[i], at);
      Poly p = parse_poly(text, vars, at);
      if (p.is_zero()) continue;
      require_homogeneous(p, text, at);
      for (const auto& [m, c] : p.terms())
        if (m.weight() == 0) throw InputError(at + ": relation '" + text + "' has a constant term");
      rels.push_back(p);
    }
  }
  return make_algebra(vars, {}, rels);
}

/// {preset: "idempotent" | "singleton"}, {poset: {objects, relations}}, or
/// {objects, morphisms: [{name, source, target}], composition: [[g, f, g∘f]]}.
inline CategoryPtr parse_category(const json& j, const std::string& where) {
  auto share = [](SmallCategory c) { return std::make_shared<const SmallCategory>(std::move(c)); };
  if (!j.is_object()) throw InputError(where + ": expected an object");
  if (j.contains("preset")) {
    std::string p = string_at(j["preset"], where + ".preset");
    if (p == "idempotent") return share(SmallCategory::idempotent());
    if (p == "singleton") return share(SmallCategory::singleton());
    throw InputError(where + ".preset: unknown category '" + p + "'");
  }
  auto strings = [&](const json& a, const std::string& at) {
    std::vector<std::string> out;
    const auto& arr = array_at(a, at);
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(string_at(arr[i], at + "[" + std::to_string(i) + "]"));
    return out;
  };
  if (j.contains("poset")) {
    std::string at = where + ".poset";
    auto objects = strings(field(j["poset"], "objects", at), at + ".objects");
    std::vector<std::pair<std::string, std::string>> rels;
    if (j["poset"].contains("relations")) {
      const auto& rs = array_at(j["poset"]["relations"], at + ".relations");
      for (std::size_t i = 0; i < rs.size(); ++i) {
        auto r = strings(rs[i], at + ".relations[" + std::to_string(i) + "]");
        if (r.size() != 2) throw InputError(at + ".relations[" + std::to_string(i) + "]: expected [lower, upper]");
        rels.emplace_back(r[0], r[1]);
      }
    }
    return share(SmallCategory::poset(objects, rels));
  }
  auto objects = strings(field(j, "objects", where), where + ".objects");
  auto object_index = [&](const std::string& name, const std::string& at) {
    for (std::size_t i = 0; i < objects.size(); ++i)
      if (objects[i] == name) return i;
    throw InputError(at + ": unknown object '" + name + "'");
  };
  std::vector<Arrow> arrows;
  if (j.contains("morphisms")) {
    const auto& ms = array_at(j["morphisms"], where + ".morphisms");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      std::string at = where + ".morphisms[" + std::to_string(i) + "]";
      Arrow a;
      a.name = string_at(field(ms[i], "name", at), at + ".name");
      a.source = object_index(string_at(field(ms[i], "source", at), at + ".source"), at + ".source");
      a.target = object_index(string_at(field(ms[i], "target", at), at + ".target"), at + ".target");
      arrows.push_back(a);
    }
  }
  std::vector<std::array<std::string, 3>> comp;
  if (j.contains("composition")) {
    const auto& cs = array_at(j["composition"], where + ".composition");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      std::string at = where + ".composition[" + std::to_string(i) + "]";
      auto c = strings(cs[i], at);
      if (c.size() != 3) throw InputError(at + ": expected [g, f, g∘f]");
      comp.push_back({c[0], c[1], c[2]});
    }
  }
  try {
    return share(SmallCategory(objects, arrows, comp));
  } catch (const InputError& e) {
    throw InputError(where + ": " + e.what());
  }
}

/// {category, objects: {name: algebra}, arrows: {name: {var: image}}}
inline AlgebraDiagram parse_diagram(const json& j, const std::string& where) {
  CategoryPtr c = parse_category(field(j, "category", where), where + ".category");
  const auto& objs = field(j, "objects", where);
  if (!objs.is_object()) throw InputError(where + ".objects: expected an object");
  std::vector<AlgebraPtr> algebras;
  for (const auto& name : c->objects()) {
    if (!objs.contains(name)) throw InputError(where + ".objects: missing algebra for object '" + name + "'");
    algebras.push_back(parse_algebra(objs[name], where + ".objects." + name));
  }
  for (const auto& [name, v] : objs.items())
    if (c->index_of_object(name) == SmallCategory::none)
      throw InputError(where + ".objects: '" + name + "' is not an object of the category");
  std::map<std::string, DGMorphism> given;
  if (j.contains("arrows")) {
    const auto& as = j["arrows"];
    if (!as.is_object()) throw InputError(where + ".arrows: expected an object");
    for (const auto& [name, images] : as.items()) {
      std::string at = where + ".arrows." + name;
      std::size_t u = c->find(name);
      if (u == SmallCategory::none) throw InputError(at + ": unknown arrow");
      const auto& a = c->morphisms()[u];
      const auto& src = algebras[a.source];
      const auto& tgt = algebras[a.target];
      if (!images.is_object()) throw InputError(at + ": expected {variable: image}");
      std::map<std::string, Poly> imgs;
      for (const auto& [var, text] : images.items()) {
        if (!src->has(var)) throw InputError(at + ": '" + var + "' is not a variable of the source");
        imgs[var] = parse_poly(string_at(text, at + "." + var), tgt->generators(), at + "." + var);
      }
      try {
        given.emplace(name, DGMorphism(src, tgt, imgs).validated());
      } catch (const InputError& e) {
        throw InputError(at + ": " + e.what());
      }
    }
  }
  try {
    return AlgebraDiagram::make(c, algebras, given);
  } catch (const InputError& e) {
    throw InputError(where + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Report encoders

inline std::string rational_str(const Rational& q) { return q.get_str(); }

inline json symbol_json(const Symbol& s) { return {{"name", s.name}, {"degree", s.degree}, {"weight", s.weight}}; }

inline json derivation_json(const Derivation& d) {
  json out = json::object();
  for (const auto& [name, v] : d.values)
    if (!v.is_zero()) out[name] = v.str();
  return out;
}

inline json diagram_derivation_json(const DiagramDerivation& d, const SmallCategory& c) {
  json out = json::object();
  for (std::size_t o = 0; o < d.size(); ++o) {
    json v = derivation_json(d[o]);
    if (!v.empty()) out[c.objects()[o]] = v;
  }
  return out;
}

/// ξ as {A-monomial: derivation}.
inline json l_elem_json(const LElem& x, const ArtinRing& A, const SmallCategory& c, bool single) {
  json out = json::object();
  for (const auto& [m, v] : x) {
    if (is_zero(v)) continue;
    out[A.monomial(m)] = single ? derivation_json(v[0]) : diagram_derivation_json(v, c);
  }
  return out;
}

inline json certificate_json(const DepthCertificate& c) {
  json failed = json::array();
  for (const auto& [d, w] : c.failed) failed.push_back({d, w});
  return {{"degree_depth", c.degree_depth},
          {"weight_bound", c.weight_bound},
          {"verified_slices", c.verified.size()},
          {"failed_slices", failed}};
}

inline json algebra_json(const DGAlgebra& a) {
  json gens = json::array();
  for (const auto& g : a.generators()) {
    json s = symbol_json(g);
    Poly d = a.d_of(g.name);
    s["d"] = d.is_zero() ? "0" : d.str();
    gens.push_back(s);
  }
  json rels = json::array();
  for (const auto& r : a.relations()) rels.push_back(r.str());
  return {{"generators", gens}, {"relations", rels}};
}

inline json factorization_json(const FactorizationResult& f) {
  json stages = json::array();
  for (const auto& s : f.stages) {
    json names = json::array();
    for (const auto& g : s.generators) names.push_back(g.name);
    stages.push_back({{"stage", s.stage}, {"degree", s.degree}, {"generators", names}});
  }
  return {{"middle", algebra_json(*f.middle)}, {"stages", stages}, {"certificate", certificate_json(f.certificate)}};
}

} // namespace tatekit::io
