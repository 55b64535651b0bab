// clone-forge: symmetric terms, the small-domain classification,
// reversible relations and LP/consistency checks for CSP instances.
//
// Exit codes: 0 ok, 1 property violated, 2 usage error, 3 budget exhausted.

#include <fstream>
#include <future>
#include <iostream>

#include <CLI11.hpp>

#include "cloneforge/catalogue.hpp"
#include "cloneforge/classification.hpp"
#include "cloneforge/conjecture.hpp"
#include "cloneforge/csp.hpp"
#include "cloneforge/io.hpp"
#include "cloneforge/reversible.hpp"
#include "cloneforge/sym.hpp"

using namespace cloneforge;

namespace {

enum Exit { kOk = 0, kViolated = 1, kUsage = 2, kBudget = 3 };

struct Globals {
  std::size_t budget = kDefaultBudget;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool json_out = false;
  std::string out;
};

std::string set_text(ElemSet s) {
  std::string r = "{";
  bool first = true;
  for (Elem e : set_elems(s)) {
    r += (first ? "" : ",") + std::to_string(e);
    first = false;
  }
  return r + "}";
}

std::vector<int> set_json(ElemSet s) {
  std::vector<int> v;
  for (Elem e : set_elems(s)) v.push_back(e);
  return v;
}

std::string tuple_text(const Tuple& t) {
  std::string r = "(";
  for (std::size_t i = 0; i < t.size(); ++i) r += (i ? "," : "") + std::to_string(t[i]);
  return r + ")";
}

// Prints text, and JSON to stdout (--json) or a file (--out).
void emit(const Globals& g, const json& j, const std::string& text) {
  if (g.json_out)
    std::cout << j.dump(2) << '\n';
  else
    std::cout << text;
  if (!g.out.empty()) {
    std::ofstream f(g.out);
    if (!f) throw ParseError("cannot write " + g.out);
    f << j.dump(2) << '\n';
  }
}

// ---------------------------------------------------------------------------

int cmd_classify(const Globals& g, int n, int verify_arity) {
  const auto rep = run_pipeline(n);
  json j{{"n", n},
         {"total_ops", rep.total_ops},
         {"classes", rep.classes},
         {"m1_survivors", rep.m1_survivors},
         {"removed", {{"M2", rep.removed[0]}, {"M3", rep.removed[1]}, {"M4", rep.removed[2]}}},
         {"linear_removed", rep.linear_removed},
         {"final", rep.final_list}};
  json maps = json::object();
  for (auto m : {ReductionMap::M1, ReductionMap::M2, ReductionMap::M3, ReductionMap::M4})
    maps[to_string(m)] = to_sexpr(map_term(m));
  j["maps"] = maps;

  std::vector<CatalogueEntry> cat = n == 4 ? catalogue_domain4(verify_arity) : catalogue_domain_le3(verify_arity);
  json entries = json::array();
  bool all_verified = true;
  for (const auto& e : cat) {
    if (e.n != n) continue;
    all_verified &= e.verified_arity >= verify_arity;
    json je{{"label", e.label},
            {"f2", binary_name(e.f2)},
            {"schema", to_string(e.schema)},
            {"stated_schema", to_string(e.stated_schema)},
            {"verified_arity", e.verified_arity}};
    if (e.f3) je["f3"] = to_json(*e.f3);
    if (!e.f3_label.empty()) je["f3_label"] = e.f3_label;
    if (!e.cycle.empty()) je["cycle"] = e.cycle;
    entries.push_back(je);
  }
  j["catalogue"] = entries;

  std::ostringstream os;
  os << "symmetric idempotent binary ops: " << rep.total_ops << '\n'
     << "isomorphism classes: " << rep.classes.size() << '\n'
     << "M1 survivors: " << rep.m1_survivors.size() << '\n'
     << "removed by M2/M3/M4: " << rep.removed[0].size() << '/' << rep.removed[1].size() << '/' << rep.removed[2].size() << '\n'
     << "removed (linear action): " << rep.linear_removed.size() << '\n'
     << "final (" << rep.final_list.size() << "):";
  for (const auto& s : rep.final_list) os << ' ' << s;
  os << "\ncatalogue entries: " << entries.size() << (all_verified ? " (all verified to arity " : " (NOT all verified to arity ")
     << verify_arity << ")\n";
  emit(g, j, os.str());
  return all_verified ? kOk : kViolated;
}

int cmd_sym_check(const Globals& g, const std::string& file, int k) {
  const Algebra alg = load_algebra(file);
  SymOptions opt;
  opt.exact.max_tuples = g.budget;
  const auto r = symmetric_term_exists(alg, k, opt);
  json j{{"answer", to_string(r.answer)}, {"arity", k}, {"arity_reached", r.arity_reached}};
  std::ostringstream os;
  os << to_string(r.answer) << '\n';
  if (r.answer == Answer::Yes) {
    const auto& w = r.witnesses.at(static_cast<std::size_t>(k - 1));
    const auto term = to_sexpr(w.term);
    j["witness"] = {{"term", term}, {"method", w.method}, {"table", to_json(w.table)}};
    os << "witness (" << w.method << "):\n" << term << '\n';
  } else {
    j["reason"] = r.reason;
    os << r.reason << '\n';
    if (r.obstruction) {
      j["tuple"] = std::vector<int>(r.obstruction->begin(), r.obstruction->end());
      os << "tuple " << tuple_text(*r.obstruction) << '\n';
    }
    os << "symmetric terms found up to arity " << r.arity_reached << '\n';
  }
  emit(g, j, os.str());
  return r.answer == Answer::Yes ? kOk : r.answer == Answer::No ? kViolated : kBudget;
}

int cmd_reversible(const Globals& g, const std::string& file, const std::string& cond, bool fixed_class) {
  const Relation rel = load_relation(file);
  json j;
  std::ostringstream os;
  bool ok = true;
  if (rel.arity() == 2) {
    const BinRel r = BinRel::from_relation(rel);
    std::vector<RevCondition> cs;
    if (cond.empty())
      for (int c = 0; c < 6; ++c) cs.push_back(static_cast<RevCondition>(c));
    else
      cs.push_back(parse_condition(cond));
    json conds = json::object();
    for (auto c : cs) {
      const auto res = reversible_bin(r, c);
      ok &= res.holds;
      json jc{{"holds", res.holds}};
      os << "(" << to_string(c) << ") " << (res.holds ? "holds" : "fails");
      if (res.set) {
        jc["set"] = set_json(*res.set);
        os << "  B=" << set_text(*res.set);
      }
      if (res.edge) {
        jc["edge"] = {res.edge->first, res.edge->second};
        os << "  edge (" << int(res.edge->first) << "," << int(res.edge->second) << ")";
      }
      if (res.exponent) {
        jc["exponent"] = *res.exponent;
        os << "  n=" << *res.exponent;
      }
      if (!res.distribution.empty()) {
        json d = json::array();
        for (const auto& q : res.distribution) d.push_back(q.get_str());
        jc["distribution"] = d;
      }
      if (!res.word.empty()) {
        jc["word"] = res.word;
        os << "  word";
        for (int w : res.word) os << (w == 0 ? " R" : " R^-");
      }
      os << '\n';
      conds[to_string(c)] = jc;
    }
    j["conditions"] = conds;
    if (fixed_class) {
      const auto fc = fixed_class_search(r);
      if (fc) {
        j["fixed_class"] = std::vector<int>(fc->begin(), fc->end());
        os << "fixed class " << tuple_text(*fc) << '\n';
      } else {
        j["fixed_class"] = nullptr;
        os << "no fixed class\n";
      }
    }
  } else {
    const auto res = reversible_general(rel);
    ok = res.reversible;
    j["reversible"] = res.reversible;
    j["monoid_size"] = res.monoid_size;
    os << (res.reversible ? "reversible" : "not reversible") << " (monoid of " << res.monoid_size << " relations)\n";
    if (!res.reversible) {
      j["reason"] = res.reason;
      os << res.reason << '\n';
      if (res.set) {
        json w = json::array();
        for (auto [a, b] : res.word) w.push_back({a + 1, b + 1});
        j["word"] = w;
        j["set"] = set_json(*res.set);
        os << "word";
        for (auto [a, b] : res.word) os << " pi_{" << a + 1 << "," << b + 1 << "}";
        os << "  B=" << set_text(*res.set) << '\n';
      }
    }
  }
  j["holds"] = ok;
  emit(g, j, os.str());
  return ok ? kOk : kViolated;
}

json walk_json(const Cycle& p) {
  json w = json::array();
  for (const auto& s : p) w.push_back({{"constraint", s.k}, {"from", s.i}, {"to", s.j}});
  return w;
}

std::string walk_text(const CspInstance& I, const Cycle& p) {
  std::string r;
  for (const auto& s : p)
    r += " " + I.vars[static_cast<std::size_t>(step_from(I, s))] + "-[" + std::to_string(s.k) + "]->" +
         I.vars[static_cast<std::size_t>(step_to(I, s))];
  return r;
}

int cmd_prague(const Globals& g, const std::string& file) {
  const CspInstance I = load_instance(file);
  const auto p1 = check_P1(I);
  json j;
  std::ostringstream os;
  j["P1"] = {{"holds", p1.holds}};
  os << "P1 " << (p1.holds ? "holds" : "fails: " + p1.reason) << '\n';
  if (!p1.holds) j["P1"]["reason"] = p1.reason;
  bool ok = p1.holds;
  auto report = [&](const char* name, const PragueResult& r) {
    ok &= r.holds;
    json jr{{"holds", r.holds}};
    os << name << ' ' << (r.holds ? "holds" : "fails");
    if (r.witness) {
      const auto& w = *r.witness;
      jr["witness"] = {{"var", I.vars[static_cast<std::size_t>(w.var)]}, {"set", set_json(w.set)}, {"p", walk_json(w.p)}};
      os << ": " << I.vars[static_cast<std::size_t>(w.var)] << " B=" << set_text(w.set) << " p:" << walk_text(I, w.p);
      if (!w.q.empty()) {
        jr["witness"]["q"] = walk_json(w.q);
        os << " q:" << walk_text(I, w.q);
      }
    }
    os << '\n';
    j[name] = jr;
  };
  report("P2", check_P2(I));
  report("P2*", check_P2star(I));
  report("P3", check_P3(I));
  j["holds"] = ok;
  emit(g, j, os.str());
  return ok ? kOk : kViolated;
}

int cmd_blp(const Globals& g, const std::string& file, bool interior) {
  const CspInstance I = load_instance(file);
  const auto sol = blp_feasible(I, interior);
  json j{{"feasible", sol.has_value()}};
  std::ostringstream os;
  if (!sol) {
    os << "infeasible\n";
    emit(g, j, os.str());
    return kViolated;
  }
  if (!check_lp_solution(I, *sol)) throw std::logic_error("LP returned an inconsistent point");
  j["solution"] = to_json(*sol);
  const auto J = restrict_to_support(I, *sol);
  const bool p1 = check_P1(J).holds, p2 = check_P2(J).holds;
  j["support"] = {{"instance", to_json(J)}, {"P1", p1}, {"P2", p2}};
  os << "feasible\n";
  for (int x = 0; x < I.num_vars(); ++x) {
    os << I.vars[static_cast<std::size_t>(x)] << ':';
    for (const auto& q : sol->var_probs[static_cast<std::size_t>(x)]) os << ' ' << q;
    os << '\n';
  }
  os << "support restriction: P1 " << (p1 ? "holds" : "fails") << ", P2 " << (p2 ? "holds" : "fails") << '\n';
  emit(g, j, os.str());
  return kOk;
}

json candidates_json(const std::vector<ConjectureCandidate>& cs) {
  json a = json::array();
  for (const auto& c : cs) {
    json gens = json::array();
    for (const auto& t : c.generators) gens.push_back(std::vector<int>(t.begin(), t.end()));
    a.push_back({{"relation", to_json(c.rel)}, {"generators", gens}});
  }
  return a;
}

int cmd_hunt(const Globals& g, const std::string& file, int max_arity, std::size_t samples, int max_gens) {
  const Algebra alg = load_algebra(file);
  const auto rep = conjecture_search(alg, max_arity, samples, g.seed, max_gens, {g.budget, 0});
  json j{{"generator_sets", rep.generator_sets},
         {"distinct_relations", rep.distinct_relations},
         {"reversible", rep.reversible},
         {"truncated", rep.truncated},
         {"candidates", candidates_json(rep.candidates)}};
  std::ostringstream os;
  os << "generator sets " << rep.generator_sets << ", distinct relations " << rep.distinct_relations << ", reversible "
     << rep.reversible << ", truncated " << rep.truncated << '\n'
     << "reversible relations without a constant tuple: " << rep.candidates.size() << '\n';
  for (const auto& c : rep.candidates) os << relation_to_text(c.rel);
  emit(g, j, os.str());
  if (!rep.candidates.empty()) return kViolated;
  return rep.truncated ? kBudget : kOk;
}

int cmd_census(const Globals& g, const std::string& file, int max_arity, int max_gens) {
  const Algebra alg = load_algebra(file);
  std::vector<std::future<ConjectureReport>> fut;
  std::vector<ConjectureReport> reps(static_cast<std::size_t>(max_arity));
  // arities are independent; run up to --jobs at a time
  for (int m = 1; m <= max_arity; m += g.jobs) {
    fut.clear();
    for (int a = m; a < m + g.jobs && a <= max_arity; ++a)
      fut.push_back(std::async(std::launch::async, [&alg, a, max_gens, &g] {
        return exhaustive_reversible_census(alg, a, max_gens, {}, {g.budget, 0});
      }));
    for (std::size_t i = 0; i < fut.size(); ++i) reps[static_cast<std::size_t>(m - 1) + i] = fut[i].get();
  }
  json j = json::array();
  std::ostringstream os;
  bool cand = false, trunc = false;
  for (int m = 1; m <= max_arity; ++m) {
    const auto& r = reps[static_cast<std::size_t>(m - 1)];
    cand |= !r.candidates.empty();
    trunc |= r.truncated > 0;
    j.push_back({{"arity", m},
                 {"generator_sets", r.generator_sets},
                 {"distinct_relations", r.distinct_relations},
                 {"reversible", r.reversible},
                 {"truncated", r.truncated},
                 {"candidates", candidates_json(r.candidates)}});
    os << "arity " << m << ": " << r.distinct_relations << " relations, " << r.reversible << " reversible, "
       << r.candidates.size() << " without a constant tuple" << (r.truncated ? " (truncated)" : "") << '\n';
  }
  emit(g, json{{"census", j}}, os.str());
  return cand ? kViolated : trunc ? kBudget : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clone-forge: symmetric terms, minimal semi-round clones, reversible relations, CSP relaxations.\n"
               "Elements are 0-based; the sign domain {-,0,+} is written 0,1,2."};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--budget", g.budget, "closure budget (stored tuples)")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::Range(1, 256));
  app.add_flag("--json", g.json_out, "print JSON instead of text");
  app.add_option("--out", g.out, "also write the JSON report to this file");

  int n = 4, verify_arity = 7, arity = 0, max_arity = 3, max_gens = 3;
  std::size_t samples = 1000;
  std::string file, condition;
  bool interior = false, fixed_class = false;

  auto* classify = app.add_subcommand("classify", "minimal semi-round clone classification for a domain size");
  classify->add_option("--n", n, "domain size (2..4)")->check(CLI::Range(2, 4));
  classify->add_option("--verify-arity", verify_arity, "arity up to which catalogue witnesses are checked")->check(CLI::Range(1, 9));

  auto* sym = app.add_subcommand("sym-check", "does the algebra have a symmetric term of the given arity");
  sym->add_option("--algebra", file, "algebra file (JSON or op lines)")->required()->check(CLI::ExistingFile);
  sym->add_option("--arity", arity, "arity")->required()->check(CLI::Range(1, 64));

  auto* rev = app.add_subcommand("reversible", "reversibility of a relation");
  rev->add_option("--relation", file, "relation file (JSON or rel text)")->required()->check(CLI::ExistingFile);
  rev->add_option("--condition", condition, "binary relations: one of a..f (default all)")
      ->check(CLI::IsMember({"a", "b", "c", "d", "e", "f"}));
  rev->add_flag("--fixed-class", fixed_class, "binary relations: class fixed by R modulo the balanced-path congruence");

  auto* prague = app.add_subcommand("prague", "conditions P1, P2, P2*, P3 of a CSP instance");
  prague->add_option("--instance", file, "instance JSON")->required()->check(CLI::ExistingFile);

  auto* blp = app.add_subcommand("blp", "basic LP relaxation, exact");
  blp->add_option("--instance", file, "instance JSON")->required()->check(CLI::ExistingFile);
  blp->add_flag("--interior", interior, "return a point of maximal support");

  auto* hunt = app.add_subcommand("hunt", "random search for reversible relations without a constant tuple");
  hunt->add_option("--algebra", file, "algebra file")->required()->check(CLI::ExistingFile);
  hunt->add_option("--max-arity", max_arity, "largest relation arity")->check(CLI::Range(1, 8));
  hunt->add_option("--samples", samples, "generator sets to try");
  hunt->add_option("--max-gens", max_gens, "tuples per generator set")->check(CLI::Range(1, 8));

  auto* census = app.add_subcommand("census", "every relation generated by at most --max-gens tuples");
  census->add_option("--algebra", file, "algebra file")->required()->check(CLI::ExistingFile);
  census->add_option("--max-arity", max_arity, "largest relation arity")->check(CLI::Range(1, 6));
  census->add_option("--max-gens", max_gens, "tuples per generator set")->check(CLI::Range(1, 4));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*classify) return cmd_classify(g, n, verify_arity);
    if (*sym) return cmd_sym_check(g, file, arity);
    if (*rev) return cmd_reversible(g, file, condition, fixed_class);
    if (*prague) return cmd_prague(g, file);
    if (*blp) return cmd_blp(g, file, interior);
    if (*hunt) return cmd_hunt(g, file, max_arity, samples, max_gens);
    if (*census) return cmd_census(g, file, max_arity, max_gens);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
