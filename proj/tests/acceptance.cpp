// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "cloneforge/catalogue.hpp"
#include "cloneforge/classification.hpp"
#include "cloneforge/conjecture.hpp"
#include "cloneforge/csp.hpp"
#include "cloneforge/examples.hpp"
#include "cloneforge/families.hpp"
#include "cloneforge/io.hpp"
#include "cloneforge/reversible.hpp"
#include "cloneforge/sym.hpp"
#include "oracles.hpp"

using namespace cloneforge;

namespace {

const char* kFinal23 =
    "f_000000 f_000002 f_000012 f_000013 f_000033 f_000111 f_000112 f_000123 f_000132 f_001031 f_001032 "
    "f_001033 f_001132 f_001133 f_001231 f_001232 f_001233 f_003012 f_003013 f_003112 f_003113 f_003312 "
    "f_011231";

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(CLONE_FORGE_BIN) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), got);
  const int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string data(const std::string& f) { return std::string(CLONEFORGE_DATA_DIR) + "/" + f; }

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cloneforge_acceptance_" + name);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Collects failures; a criterion passes when none were recorded.
struct Check {
  std::vector<std::string> failures;
  std::string note;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok && failures.size() == 5) failures.push_back("...");
  }
};

int failed = 0;

void criterion(int id, const std::string& title, double limit_s, const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs >= limit_s) c.failures.push_back("took " + std::to_string(secs) + " s, limit " + std::to_string(limit_s));
  const bool ok = c.failures.empty();
  failed += !ok;
  std::printf("%s %2d: %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", id, title.c_str(), secs,
              c.note.empty() ? "" : " ", c.note.c_str());
  for (const auto& f : c.failures) std::printf("        %s\n", f.c_str());
  std::fflush(stdout);
}

OpTable random_symmetric(std::mt19937_64& rng, int n, int k, bool idempotent) {
  std::map<Tuple, Elem> val;
  return OpTable::from_function(n, k, [&](const Tuple& x) {
    Tuple s = x;
    std::sort(s.begin(), s.end());
    auto it = val.find(s);
    if (it != val.end()) return it->second;
    const Elem v = idempotent && s.front() == s.back() ? s[0] : static_cast<Elem>(rng() % static_cast<std::uint64_t>(n));
    val[s] = v;
    return v;
  });
}

BinRel random_subdirect(std::mt19937_64& rng, int n) {
  const std::uint64_t mask = (std::uint64_t{1} << (n * n)) - 1;
  for (;;) {
    const double density = 0.1 + 0.5 * static_cast<double>(rng() % 100) / 100.0;
    std::bernoulli_distribution coin(density);
    std::uint64_t bits = 0;
    for (int i = 0; i < n * n; ++i)
      if (coin(rng)) bits |= std::uint64_t{1} << i;
    const BinRel r(n, bits & mask);
    if (r.subdirect()) return r;
  }
}

bool conditions_agree(const BinRel& r) {
  const bool a = reversible_bin(r, RevCondition::A).holds;
  for (auto c : {RevCondition::B, RevCondition::C, RevCondition::D, RevCondition::E, RevCondition::F})
    if (reversible_bin(r, c).holds != a) return false;
  return true;
}

CspInstance random_instance(std::mt19937_64& rng, int n, int nvars, int ncons, int max_arity, double density) {
  std::bernoulli_distribution coin(density);
  std::vector<Constraint> cs;
  for (int k = 0; k < ncons; ++k) {
    const int ar = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_arity));
    std::vector<int> scope;
    for (int i = 0; i < ar; ++i) scope.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(nvars)));
    std::vector<Tuple> ts;
    for_each_tuple(n, ar, [&](const Tuple& t) {
      if (coin(rng)) ts.push_back(t);
    });
    cs.push_back({scope, Relation(n, ar, std::move(ts))});
  }
  return make_instance(n, nvars, cs);
}

// Every cycle x0 -> x1 -> ... -> x0 of the given length over the relation list, each edge in either orientation.
void for_each_single_cycle(int n, int len, const std::vector<BinRel>& rels, const std::function<void(const CspInstance&)>& fn) {
  std::vector<Constraint> cs;
  std::function<void(int)> rec = [&](int i) {
    if (i == len) {
      fn(make_instance(n, len, cs));
      return;
    }
    for (const auto& r : rels)
      for (bool flip : {false, true}) {
        if (flip && len == 1) continue;
        std::vector<int> scope{i, (i + 1) % len};
        if (flip) std::swap(scope[0], scope[1]);
        cs.push_back({scope, (flip ? reverse(r) : r).to_relation()});
        rec(i + 1);
        cs.pop_back();
      }
  };
  rec(0);
}

}  // namespace

int main() {
  criterion(1, "classify --n 4: 4096 ops, 192 classes, 37 M1 survivors, the final 23", 60, [](Check& c) {
    const auto out = scratch("classify.json");
    const auto r = run("--jobs 1 classify --n 4 --out " + out.string());
    c.expect(r.code == 0, "exit code " + std::to_string(r.code));
    const auto j = json::parse(read_file(out.string()));
    c.expect(j.at("total_ops") == 4096, "total_ops " + j.at("total_ops").dump());
    c.expect(j.at("classes").size() == 192, "classes " + std::to_string(j.at("classes").size()));
    c.expect(j.at("m1_survivors").size() == 37, "m1 survivors " + std::to_string(j.at("m1_survivors").size()));
    const auto fin = j.at("final").get<std::vector<std::string>>();
    c.expect(fin == words(kFinal23), "final list differs: " + j.at("final").dump());
    std::filesystem::remove(out);
  });

  criterion(2, "domain 3: 7 classes, <f_+-0> has no ternary symmetric term, two round clones to arity 7", 30, [](Check& c) {
    const auto classes = iso_classes(enumerate_binary_sym_idem(3));
    c.expect(classes.size() == 7, "classes " + std::to_string(classes.size()));
    const auto r = symmetric_term_exists(binary_algebra("f_+-0", 3), 3);
    c.expect(r.answer == Answer::No, std::string("<f_+-0> at arity 3: ") + to_string(r.answer));
    c.expect(r.arity_reached == 2, "arity reached " + std::to_string(r.arity_reached));

    const auto cat = catalogue_domain_le3(7);
    auto check_entry = [&](const std::string& label, const OpTable& f2, const std::optional<OpTable>& f3) {
      auto it = std::find_if(cat.begin(), cat.end(), [&](const CatalogueEntry& e) { return e.label == label; });
      if (it == cat.end()) return c.expect(false, "missing catalogue entry " + label);
      c.expect(it->f2 == f2 && it->f3 == f3, label + ": unexpected generators");
      c.expect(it->verified_arity == 7, label + ": verified to " + std::to_string(it->verified_arity));
      for (int k = 2; k <= 7; ++k) {
        const OpTable w = build_witness(*it, k);
        c.expect(w.arity() == k && is_symmetric(w), label + ": witness at arity " + std::to_string(k));
        for (Elem a = 0; a < 3; ++a) c.expect(w(Tuple(static_cast<std::size_t>(k), a)) == a, label + ": witness not idempotent");
      }
    };
    // g with c = 0 (the middle element)
    check_entry("<f_+-0, f_3>", binary_from_name("f_+-0", 3), sign_rotation_ternary(1));
    c.expect(binary_name(sign_sum(2)) == "f_+0-", "sgn(x+y) is " + binary_name(sign_sum(2)));
    check_entry("<f_+0->", sign_sum(2), std::nullopt);
    for (int k = 2; k <= 7; ++k) c.expect(is_symmetric(sign_sum(k)), "sgn sum at arity " + std::to_string(k));
  });

  criterion(3, "averaging algebras p = 3, 5: symmetric terms below p, sym-check says no at p", 0, [](Check& c) {
    for (int p : {3, 5}) {
      const auto alg = averaging_algebra(p);
      const auto file = load_algebra(data("averaging-p" + std::to_string(p) + ".json"));
      c.expect(file.ops == alg.ops, "bundled algebra differs for p=" + std::to_string(p));
      const auto r = symmetric_term_exists(alg, p - 1);
      c.expect(r.answer == Answer::Yes, "p=" + std::to_string(p) + " below p: " + to_string(r.answer));
      c.expect(static_cast<int>(r.witnesses.size()) == p - 1, "p=" + std::to_string(p) + ": witness count");
      for (const auto& w : r.witnesses) {
        c.expect(is_symmetric(w.table), "p=" + std::to_string(p) + ": witness of arity " + std::to_string(w.arity));
        c.expect(evaluate(w.term, alg, w.arity) == w.table, "p=" + std::to_string(p) + ": term disagrees with table");
      }
      const auto cli = run("--json sym-check --algebra " + data("averaging-p" + std::to_string(p) + ".json") +
                           " --arity " + std::to_string(p));
      c.expect(cli.code == 1, "sym-check exit " + std::to_string(cli.code));
      c.expect(json::parse(cli.out).at("answer") == "no", "sym-check answer " + cli.out);
    }
  });

  criterion(4, "100 random symmetric (f2, f3) pairs give a symmetric f4", 5, [](Check& c) {
    std::mt19937_64 rng(404);
    for (int it = 0; it < 100; ++it) {
      const int n = 1 + static_cast<int>(rng() % 4);
      const bool idem = it % 2 == 0;
      const OpTable f2 = random_symmetric(rng, n, 2, idem), f3 = random_symmetric(rng, n, 3, idem);
      c.expect(oracle::symmetric_all_perms(pairing_f4(f2, f3)), "pair " + std::to_string(it));
    }
  });

  criterion(5, "conditions (a)-(f) agree: all subdirect relations at n=3, 10^4 random at n=4", 0, [](Check& c) {
    int count = 0, rev = 0;
    for (std::uint64_t bits = 1; bits < (1u << 9); ++bits) {
      const BinRel r(3, bits);
      if (!r.subdirect()) continue;
      ++count;
      rev += reversible_bin(r, RevCondition::A).holds;
      c.expect(conditions_agree(r), "n=3 bits " + std::to_string(bits));
    }
    std::mt19937_64 rng(505);
    for (int it = 0; it < 10000; ++it) {
      const BinRel r = random_subdirect(rng, 4);
      c.expect(conditions_agree(r), "n=4 bits " + std::to_string(r.bits()));
    }
    c.note = "[" + std::to_string(count) + " subdirect at n=3, " + std::to_string(rev) + " reversible]";
  });

  criterion(6, "5-ary relation: projections reversible, relation not; word pi_{1,2} pi_{4,5}, B={-}", 0, [](Check& c) {
    const Relation R = sum_negation_relation();
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        c.expect(reversible_bin(project2(R, i, j), RevCondition::A).holds, "projection " + std::to_string(i + 1) + std::to_string(j + 1));
    const auto res = reversible_general(R);
    c.expect(!res.reversible, "reported reversible");
    c.expect(res.word == std::vector<std::pair<int, int>>{{0, 1}, {3, 4}}, "word differs");
    c.expect(res.set == set_of({0}), "set differs");
  });

  criterion(7, "sign algebra: reversible relations of arity <= 4 from <= 3 generators contain the case constant", 300, [](Check& c) {
    std::size_t sets = 0, reversible = 0, subdirect_checked = 0, truncated = 0;
    for (int m = 1; m <= 4; ++m) {
      const auto rep = exhaustive_reversible_census(sign_algebra(), m, 3, [&](const Relation& r) {
        bool subdirect = true;
        for (int i = 0; i < m; ++i) subdirect &= r.values_at(i).size() == 3;
        if (!subdirect || m < 2) return;
        ++subdirect_checked;
        const auto cases = sign_cases(r);
        c.expect(!cases.empty(), "subdirect reversible relation outside the three cases at m=" + std::to_string(m));
        for (char k : cases)
          c.expect(r.contains(Tuple(static_cast<std::size_t>(m), sign_case_constant(k))),
                   std::string("case ") + k + " constant missing at m=" + std::to_string(m));
      });
      c.expect(rep.candidates.empty(), "reversible relation without a constant at m=" + std::to_string(m));
      sets += rep.generator_sets;
      reversible += rep.reversible;
      truncated += rep.truncated;
    }
    c.expect(truncated == 0, "truncated closures " + std::to_string(truncated));
    c.note = "[" + std::to_string(sets) + " generator sets, " + std::to_string(reversible) + " reversible, " + std::to_string(subdirect_checked) + " subdirect checked]";
  });

  criterion(8, "10^3 random feasible instances: the LP support passes P1 and P2", 0, [](Check& c) {
    std::mt19937_64 rng(808);
    int feasible = 0;
    while (feasible < 1000) {
      const int n = 2 + static_cast<int>(rng() % 2);
      const int ncons = 1 + static_cast<int>(rng() % 4);
      const auto I = random_instance(rng, n, 2 + static_cast<int>(rng() % 3), ncons, 3, 0.5);
      const auto lp = blp_feasible(I, feasible % 2 == 1);
      if (!lp) continue;
      ++feasible;
      c.expect(check_lp_solution(I, *lp), "invalid LP solution");
      const auto J = restrict_to_support(I, *lp);
      c.expect(check_P1(J).holds, "P1 fails on instance " + std::to_string(feasible));
      c.expect(check_P2(J).holds, "P2 fails on instance " + std::to_string(feasible));
    }
  });

  criterion(9, "single cycles of length <= 3 with P1 and P2: full support", 0, [](Check& c) {
    std::vector<BinRel> sign;
    for (const auto& name : sign_relation_names()) sign.push_back(sign_relation(name));
    std::vector<BinRel> two;
    for (std::uint64_t bits = 1; bits < 16; ++bits) two.emplace_back(2, bits);
    std::vector<BinRel> three;
    for (std::uint64_t bits = 1; bits < (1u << 9); ++bits)
      if (BinRel(3, bits).subdirect()) three.emplace_back(3, bits);
    std::size_t tested = 0;
    auto check = [&](const CspInstance& I) {
      if (!check_P1(I).holds || !check_P2(I).holds) return;
      ++tested;
      const auto s = single_cycle_lp(I);
      c.expect(check_lp_solution(I, s), "invalid solution");
      for (const auto& probs : s.con_probs)
        for (const auto& q : probs) c.expect(sgn(q) > 0, "a tuple outside the support");
    };
    for (int len = 1; len <= 3; ++len) {
      for_each_single_cycle(3, len, sign, check);
      for_each_single_cycle(2, len, two, check);
    }
    // every subdirect relation on three elements, cycles of length <= 2
    for (int len = 1; len <= 2; ++len) for_each_single_cycle(3, len, three, check);
    c.expect(tested > 100, "only " + std::to_string(tested) + " instances");
    c.note = "[" + std::to_string(tested) + " instances]";
  });

  criterion(10, "20 random semi-round algebras at n=5: sym-check yes up to arity 8", 1800, [](Check& c) {
    std::mt19937_64 rng(1);
    int yes = 0;
    for (int i = 0; i < 20; ++i) {
      Algebra a{5, {}};
      for (int k = 2; k <= 5; ++k) a.ops.push_back(random_symmetric(rng, 5, k, true));
      const auto file = scratch("alg" + std::to_string(i) + ".json");
      std::ofstream(file) << to_json(a).dump();
      const auto r = run("--json sym-check --algebra " + file.string() + " --arity 8");
      std::filesystem::remove(file);
      const auto j = json::parse(r.out);
      const bool ok = r.code == 0 && j.at("answer") == "yes";
      c.expect(ok, "algebra " + std::to_string(i) + ": " + j.value("answer", std::string("?")) + " exit " + std::to_string(r.code));
      if (!ok) continue;
      const OpTable w = op_from_json(j.at("witness").at("table"));
      c.expect(w.arity() == 8 && is_symmetric(w), "algebra " + std::to_string(i) + ": witness not symmetric of arity 8");
      ++yes;
    }
    c.note = "[" + std::to_string(yes) + "/20 yes]";
  });

  criterion(11, "mapping cycles of the ternary families", 0, [](Check& c) {
    auto cycles = [](const std::string& base) {
      const auto fm = family_map(family(base));
      std::vector<std::string> out;
      for (const auto& cyc : fm.cycles)
        if (cyc.size() > 1) out.push_back(cycle_string(fm, cyc));
      return out;
    };
    const std::vector<std::string> one{"g_1 -> g_3 -> g_2 -> g_1"};
    const std::vector<std::string> zero{"g_0 -> g_3 -> g_1 -> g_0"};
    const std::vector<std::string> three{"g_{0,0} -> g_{3,3} -> g_{1,2} -> g_{0,0}",
                                         "g_{0,2} -> g_{3,0} -> g_{1,3} -> g_{0,2}",
                                         "g_{0,3} -> g_{3,2} -> g_{1,0} -> g_{0,3}"};
    const std::vector<std::pair<std::string, std::vector<std::string>>> expected{
        {"f_000132", one}, {"f_001132", one}, {"f_003013", zero}, {"f_003113", zero},
        {"f_003012", three}, {"f_003112", three}, {"f_003312", three}};
    for (const auto& [base, want] : expected) {
      const auto got = cycles(base);
      std::string shown;
      for (const auto& s : got) shown += "[" + s + "] ";
      c.expect(got == want, base + ": " + shown);
    }
  });

  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
