// tatekit <subcommand> <input.json> [--depth N] [--weight W] [--k K] [--base SPEC] [--out FILE]
//
// Exit codes: 0 ok, 1 internal integrity failure, 2 invalid input or
// unsupported index, 3 truncation bound too small.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tatekit/deformation.hpp"
#include "tatekit/io.hpp"

using namespace tatekit;
using io::json;

namespace {

struct Options {
  std::string input;
  int depth = 3;
  int weight = 6;
  int k = 2;
  std::string base = "t^2";
  std::string out;
};

json load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": malformed JSON: " + e.what());
  }
}

AlgebraPtr K() { return make_algebra({}); }

FactorizationResult resolve_algebra(const AlgebraPtr& s, const Options& o) {
  return tate_factorize(DGMorphism(K(), s, {}), o.depth, o.weight);
}

/// The diagram itself when its index is direct, else ε* restricted to the
/// nondegenerate direct part of N(B)≤k.
struct DirectDiagram {
  AlgebraDiagram diagram;
  std::vector<std::size_t> anchors;
  std::string index;
};

DirectDiagram make_direct(const AlgebraDiagram& s, int k) {
  try {
    direct_degrees(*s.index);
    return {s, {}, "direct"};
  } catch (const UnsupportedIndexError&) {
  }
  auto n = nerve_truncation(s.index, k);
  auto sub = direct_part(n, n.nondegenerate());
  DirectDiagram out{restrict_diagram(epsilon_star(s, n), sub), {}, "nerve_direct_part(k=" + std::to_string(k) + ")"};
  for (std::size_t u = 0; u < sub.morphisms.size(); ++u)
    if (!sub.cat->morphisms()[u].identity && n.is_anchor(sub.morphisms[u])) out.anchors.push_back(u);
  return out;
}

json bounds_json(const Options& o) { return {{"depth", o.depth}, {"weight", o.weight}}; }

json run_resolve(const json& in, const Options& o) {
  auto s = io::parse_algebra(io::field(in, "algebra", "input"), "input.algebra");
  return {{"resolution", io::factorization_json(resolve_algebra(s, o))}};
}

json run_tangent(const json& in, const Options& o) {
  auto s = io::parse_algebra(io::field(in, "algebra", "input"), "input.algebra");
  auto f = resolve_algebra(s, o);
  json table = json::object();
  for (int i = 0; i <= 2; ++i) {
    json rows = json::array();
    std::size_t total = 0;
    for (const auto& t : tangent_cohomology(f, i, weight_range(-o.weight, o.weight))) {
      if (t.dim == 0) continue;
      json reps = json::array();
      for (const auto& r : t.representatives) reps.push_back(io::derivation_json(r));
      rows.push_back({{"weight", t.weight}, {"dim", t.dim}, {"representatives", reps}});
      total += t.dim;
    }
    table["T" + std::to_string(i)] = {{"total", total}, {"by_weight", rows}};
  }
  return {{"resolution", io::factorization_json(f)}, {"weights", {-o.weight, o.weight}}, {"tangent", table}};
}

json mc_report(const DGLie& l, const std::vector<AlgebraPtr>& targets, const ArtinPtr& A, const SmallCategory& c,
               bool single, const std::vector<std::size_t>& anchors, const Options& o) {
  auto res = mc_solve(l, A, weight_range(-o.weight, 0));
  json h = json::array();
  for (const auto& [w, n] : res.h1)
    if (n || res.h2.at(w)) h.push_back({{"weight", w}, {"H1", n}, {"H2", res.h2.at(w)}});
  json dirs = json::array();
  for (const auto& d : res.directions)
    dirs.push_back({{"parameter", A->monomial(d.parameter)},
                    {"weight", d.weight},
                    {"cocycle", single ? io::derivation_json(d.cocycle[0]) : io::diagram_derivation_json(d.cocycle, c)}});
  json reps = json::array();
  for (const auto& x : res.representatives) {
    if (!is_maurer_cartan(l, x)) throw IntegrityError("representative fails the Maurer–Cartan identity");
    auto real = realize(l, targets, x, o.weight, anchors);
    json objs = json::array();
    for (std::size_t i = 0; i < real.objects.size(); ++i) {
      const auto& ob = real.objects[i];
      objs.push_back({{"object", c.objects()[i]},
                      {"flat", ob.flat},
                      {"reduces_to_target", ob.reduces},
                      {"h0_dims", ob.h0_dims},
                      {"relations", ob.relations}});
    }
    reps.push_back({{"xi", io::l_elem_json(x.xi, *A, c, single)}, {"anchors_iso", real.anchors_iso}, {"realization", objs}});
  }
  json obs = json::array();
  for (const auto& ob : res.obstructions)
    obs.push_back({{"direction", ob.direction},
                   {"monomial", ob.monomial},
                   {"weight", ob.weight},
                   {"class", single ? io::derivation_json(ob.cocycle[0]) : io::diagram_derivation_json(ob.cocycle, c)}});
  return {{"base", {{"spec", o.base}, {"ring", A->str()}, {"dim", A->dim()}}},
          {"cohomology", h},
          {"orbit_dimension", res.orbit_dimension()},
          {"directions", dirs},
          {"representatives", reps},
          {"obstructions", obs}};
}

json run_deform(const json& in, const Options& o) {
  if (o.depth < 3) throw TruncationError("deform needs --depth >= 3 to see L^2, got " + std::to_string(o.depth));
  auto A = std::make_shared<const ArtinRing>(ArtinRing::parse(o.base));
  if (in.contains("algebra")) {
    auto s = io::parse_algebra(in["algebra"], "input.algebra");
    auto f = resolve_algebra(s, o);
    auto single = SmallCategory::singleton();
    return {{"resolution", io::factorization_json(f)},
            {"deformations", mc_report(DGLie::single(f.middle), {s}, A, single, true, {}, o)}};
  }
  auto s = io::parse_diagram(io::field(in, "diagram", "input"), "input.diagram");
  auto d = make_direct(s, o.k);
  auto r = reedy_cofibrant_replacement(d.diagram, o.depth, o.weight);
  if (!check_replacement(r, d.diagram).ok()) throw IntegrityError("Reedy replacement failed its structural checks");
  return {{"index", d.index},
          {"deformations", mc_report(DGLie::of(r.diagram), d.diagram.objects, A, *d.diagram.index, false, d.anchors, o)}};
}

json run_nerve(const json& in, const Options& o) {
  auto c = io::parse_category(io::field(in, "category", "input"), "input.category");
  auto n = nerve_truncation(c, o.k);
  std::size_t anchors = 0, injective = 0;
  for (std::size_t m = 0; m < n.cat->size(); ++m) {
    anchors += n.is_anchor(m);
    injective += n.is_injective(m);
  }
  json simplices = json::array();
  for (const auto& s : n.simplices) simplices.push_back(simplex_name(*c, s));
  return {{"k", o.k},
          {"level_counts", n.level_counts()},
          {"nondegenerate", n.nondegenerate().size()},
          {"morphisms", n.cat->size()},
          {"anchors", anchors},
          {"injective", injective},
          {"simplices", simplices}};
}

FiniteGroup parse_group(const json& j, const std::string& where) {
  if (j.is_string()) {
    if (j.get<std::string>() == "S3") return FiniteGroup::symmetric3();
    throw InputError(where + ": unknown group '" + j.get<std::string>() + "'");
  }
  try {
    auto t = j.get<std::vector<std::vector<int>>>();
    for (const auto& row : t) {
      if (row.size() != t.size()) throw InputError("multiplication table is not square");
      for (int v : row)
        if (v < 0 || v >= static_cast<int>(t.size())) throw InputError("entry " + std::to_string(v) + " out of range");
    }
    return FiniteGroup(std::move(t));
  } catch (const json::exception&) {
    throw InputError(where + ": expected \"S3\" or a multiplication table");
  } catch (const InputError& e) {
    throw InputError(where + ": " + e.what());
  }
}

json run_cosimplicial(const json& in, const Options& o) {
  const auto& spec = io::field(in, "cosimplicial", "input");
  auto h = parse_group(io::field(spec, "group", "input.cosimplicial"), "input.cosimplicial.group");
  const auto& x = io::field(spec, "simplicial_set", "input.cosimplicial");
  int p = io::int_at(io::field(x, "dim", "input.cosimplicial.simplicial_set"), "input.cosimplicial.simplicial_set.dim");
  bool collapse = x.value("collapse", false);
  if (o.k < 1) throw InputError("--k must be >= 1 for cosimplicial-check");
  CosimplicialGroup g(h, SimplicialSet(p, collapse, o.k + 1));
  if (auto bad = g.identity_failure()) throw IntegrityError("cosimplicial identities fail: " + *bad);
  json rows = json::array();
  bool ok = true;
  for (int n = 1; n <= o.k; ++n) {
    auto c = extension_census(g, n);
    bool agree = c.solved == c.compatible && c.compatible == c.realized;
    ok = ok && agree;
    rows.push_back({{"n", n},
                    {"subsets", c.subsets},
                    {"compatible", c.compatible},
                    {"solved", c.solved},
                    {"realized", c.realized},
                    {"agree", agree}});
  }
  if (!ok) throw IntegrityError("cosimplicial extension census disagrees with exhaustive search");
  return {{"group_order", h.size()}, {"census", rows}};
}

json run_resolve_diagram(const json& in, const Options& o) {
  auto s = io::parse_diagram(io::field(in, "diagram", "input"), "input.diagram");
  auto d = make_direct(s, o.k);
  auto r = reedy_cofibrant_replacement(d.diagram, o.depth, o.weight);
  auto check = check_replacement(r, d.diagram);
  const auto& c = *d.diagram.index;
  json objs = json::array();
  for (std::size_t a = 0; a < r.diagram.objects.size(); ++a) {
    json gens = json::array();
    for (const auto& g : r.diagram.objects[a]->generators()) gens.push_back(g.name);
    objs.push_back({{"object", c.objects()[a]},
                    {"generators", gens},
                    {"latching_generators", r.latching[a]->generators().size()},
                    {"semifree_extension", static_cast<bool>(check.semifree_extension[a])},
                    {"certified", static_cast<bool>(check.certified[a])},
                    {"certificate", io::certificate_json(r.factorizations[a].certificate)}});
  }
  json out = {{"index", d.index},
              {"objects", objs},
              {"functorial", !check.functoriality_failure},
              {"projection_natural", check.projection_natural},
              {"ok", check.ok()}};
  if (!check.ok()) throw IntegrityError("Reedy replacement failed its structural checks");
  return out;
}

int emit(const json& report, const Options& o) {
  std::string text = report.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.out);
    if (!f) throw InputError("cannot write '" + o.out + "'");
    f << text;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tate resolutions, tangent cohomology and deformations of weighted algebras and diagrams"};
  app.require_subcommand(1);
  Options o;
  std::string kind;
  for (const char* name : {"resolve", "tangent", "deform", "nerve", "cosimplicial-check", "resolve-diagram"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("input", o.input, "input JSON file")->required();
    sub->add_option("--depth", o.depth, "resolution depth N (degrees -N..0)")->check(CLI::NonNegativeNumber);
    sub->add_option("--weight", o.weight, "weight bound W")->check(CLI::NonNegativeNumber);
    sub->add_option("--k", o.k, "nerve truncation level / cosimplicial level");
    sub->add_option("--base", o.base, "Artin base, e.g. t^2 or t,s^3/t^2");
    sub->add_option("--out", o.out, "write the report here instead of stdout");
    sub->callback([&kind, name] { kind = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    json in = load(o.input);
    json body;
    if (kind == "resolve") body = run_resolve(in, o);
    else if (kind == "tangent") body = run_tangent(in, o);
    else if (kind == "deform") body = run_deform(in, o);
    else if (kind == "nerve") body = run_nerve(in, o);
    else if (kind == "cosimplicial-check") body = run_cosimplicial(in, o);
    else body = run_resolve_diagram(in, o);
    json report = {{"schema_version", io::schema_version}, {"kind", kind}, {"bounds", bounds_json(o)}};
    report.update(body);
    return emit(report, o);
  } catch (const TruncationError& e) {
    std::cerr << "truncation: " << e.what() << "\n";
    return 3;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity: " << e.what() << "\n";
    return 1;
  } catch (const InputError& e) {
    std::cerr << "input: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedIndexError& e) {
    std::cerr << "unsupported index: " << e.what() << "\n";
    return 2;
  }
}
