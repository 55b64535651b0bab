#pragma once
// Ternary families g_c / g_{c,d} forced next to certain domain-4 binary ops,
// and the maps theta / Theta acting on them.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "naming.hpp"
#include "op_table.hpp"

namespace cloneforge {

namespace detail {

inline Tuple pointwise2(const OpTable& f, const Tuple& u, const Tuple& v) {
  Tuple z(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) z[i] = f({u[i], v[i]});
  return z;
}

}  // namespace detail

// theta(f2, f3)(x) = c^N(f2(u, f3(u)))_1 with u = c^N(x).
inline OpTable theta(const OpTable& f2, const OpTable& f3) {
  return OpTable::from_function(f2.domain_size(), 3, [&](const Tuple& x) {
    Tuple u = leave_one_out_stable(f2, x);
    const Elem s = f3(u);
    return leave_one_out_stable(f2, detail::pointwise2(f2, u, Tuple(3, s)))[0];
  });
}

// Theta(f2, f3)(x) = c^N(f2(u, f3(u)))_1 with u = f2(c^N(x), c^{N+1}(x)).
inline OpTable big_theta(const OpTable& f2, const OpTable& f3) {
  return OpTable::from_function(f2.domain_size(), 3, [&](const Tuple& x) {
    Tuple a = leave_one_out_stable(f2, x);
    Tuple u = detail::pointwise2(f2, a, leave_one_out(f2, a));
    const Elem s = f3(u);
    return leave_one_out_stable(f2, detail::pointwise2(f2, u, Tuple(3, s)))[0];
  });
}

struct TernaryFamily {
  std::string base;  // name of the binary op, e.g. "f_003012"
  int params = 1;    // 1: g_c, 2: g_{c,d}
  bool big = false;  // Theta instead of theta
  std::string stated_schema;  // S3 or S4
};

inline const std::vector<TernaryFamily>& ternary_families() {
  static const std::vector<TernaryFamily> fams{
      {"f_000132", 1, false, "S3"}, {"f_003012", 2, false, "S3"}, {"f_003013", 1, false, "S3"},
      {"f_003112", 2, false, "S3"}, {"f_003113", 1, false, "S3"}, {"f_001132", 1, true, "S4"},
      {"f_003312", 2, true, "S4"}};
  return fams;
}

inline const TernaryFamily& family(const std::string& base) {
  for (const auto& f : ternary_families())
    if (f.base == base) return f;
  throw std::invalid_argument("no ternary family for " + base);
}

namespace detail {

using ElemSet = unsigned;  // bitmask over {0,1,2,3}

inline ElemSet S(std::initializer_list<int> xs) {
  ElemSet m = 0;
  for (int x : xs) m |= 1u << x;
  return m;
}

inline bool in(ElemSet s, std::initializer_list<ElemSet> options) {
  return std::find(options.begin(), options.end(), s) != options.end();
}

// sigma^{-1}(sgn(sigma x + sigma y + sigma z)) for sigma given on three points.
inline Elem sgn_sum_renamed(const Tuple& x, const std::map<Elem, int>& sigma) {
  int s = 0;
  for (Elem e : x) s += sigma.at(e);
  const int v = (s > 0) - (s < 0);
  for (auto [e, w] : sigma)
    if (w == v) return e;
  throw std::logic_error("sigma is not onto {-1,0,1}");
}

inline Elem family_value(const std::string& base, ElemSet s, const Tuple& x, int c, int d) {
  const auto E = [](int v) { return static_cast<Elem>(v); };
  if (base == "f_000132") {
    if (s & 1u) return 0;
    if (in(s, {S({1}), S({1, 2})})) return 1;
    if (in(s, {S({2}), S({2, 3})})) return 2;
    if (in(s, {S({3}), S({1, 3})})) return 3;
    return E(c);
  }
  if (base == "f_003012") {
    if (in(s, {S({0}), S({0, 1}), S({0, 2}), S({1, 2}), S({0, 1, 2}), S({1, 2, 3})})) return 0;
    if (in(s, {S({1}), S({1, 3})})) return 1;
    if (in(s, {S({2}), S({2, 3})})) return 2;
    if (in(s, {S({3}), S({0, 3})})) return 3;
    return E(s == S({0, 1, 3}) ? c : d);
  }
  if (base == "f_003013") {
    if (in(s, {S({0}), S({0, 1}), S({0, 2}), S({1, 2}), S({0, 1, 2})})) return 0;
    if (in(s, {S({1}), S({1, 3})})) return 1;
    if (s == S({2})) return 2;
    if (in(s, {S({3}), S({0, 3}), S({2, 3}), S({0, 2, 3})})) return 3;
    return E(c);
  }
  if (base == "f_003112") {
    if (in(s, {S({0}), S({0, 1}), S({0, 2}), S({0, 1, 2})})) return 0;
    if (in(s, {S({1}), S({1, 2}), S({1, 3}), S({1, 2, 3})})) return 1;
    if (in(s, {S({2}), S({2, 3})})) return 2;
    if (in(s, {S({3}), S({0, 3})})) return 3;
    return E(s == S({0, 1, 3}) ? c : d);
  }
  if (base == "f_003113") {
    if (in(s, {S({0}), S({0, 1}), S({0, 2}), S({0, 1, 2})})) return 0;
    if (in(s, {S({1}), S({1, 2}), S({1, 3}), S({1, 2, 3})})) return 1;
    if (s == S({2})) return 2;
    if (in(s, {S({3}), S({0, 3}), S({2, 3}), S({0, 2, 3})})) return 3;
    return E(c);
  }
  if (base == "f_001132") {
    if (in(s, {S({0, 2}), S({0, 1, 2}), S({0, 2, 3})})) return 0;
    if (s == S({1, 2})) return 1;
    if (in(s, {S({2}), S({2, 3})})) return 2;
    if ((s & ~S({0, 1, 3})) == 0) return sgn_sum_renamed(x, {{0, -1}, {1, 0}, {3, 1}});
    return E(c);
  }
  if (base == "f_003312") {
    if (in(s, {S({0}), S({0, 1}), S({0, 2})})) return 0;
    if (in(s, {S({0, 3}), S({0, 1, 2})})) return 3;
    if ((s & ~S({1, 2, 3})) == 0) return sgn_sum_renamed(x, {{1, -1}, {2, 1}, {3, 0}});
    return E(s == S({0, 1, 3}) ? c : d);
  }
  throw std::invalid_argument("no ternary family for " + base);
}

}  // namespace detail

// g_c (one parameter) or g_{c,d} for the family next to `base`.
inline OpTable family_member(const std::string& base, std::vector<int> params) {
  const auto& fam = family(base);
  if (static_cast<int>(params.size()) != fam.params) throw std::invalid_argument("wrong number of parameters");
  for (int p : params)
    if (p < 0 || p > 3) throw std::invalid_argument("parameter out of range");
  const int c = params[0], d = fam.params > 1 ? params[1] : 0;
  return OpTable::from_function(4, 3, [&](const Tuple& x) {
    detail::ElemSet s = 0;
    for (Elem e : x) s |= 1u << e;
    return detail::family_value(base, s, x, c, d);
  });
}

inline std::string member_label(const std::vector<int>& p) {
  if (p.size() == 1) return "g_" + std::to_string(p[0]);
  return "g_{" + std::to_string(p[0]) + "," + std::to_string(p[1]) + "}";
}

inline std::vector<std::vector<int>> family_params(const TernaryFamily& fam) {
  std::vector<std::vector<int>> out;
  for (int c = 0; c < 4; ++c) {
    if (fam.params == 1) {
      out.push_back({c});
      continue;
    }
    for (int d = 0; d < 4; ++d) out.push_back({c, d});
  }
  return out;
}

struct FamilyMap {
  TernaryFamily fam;
  std::vector<std::vector<int>> params;
  // image[i]: index of theta/Theta(f2, g_i) among the members, if it is one
  std::vector<std::optional<std::size_t>> image;
  std::vector<bool> image_symmetric;
  std::vector<std::vector<std::size_t>> cycles;  // each starts at its least member
};

inline FamilyMap family_map(const TernaryFamily& fam) {
  FamilyMap fm;
  fm.fam = fam;
  fm.params = family_params(fam);
  const OpTable f2 = binary_from_name(fam.base, 4);
  std::vector<OpTable> members;
  for (const auto& p : fm.params) members.push_back(family_member(fam.base, p));
  for (const auto& g : members) {
    OpTable img = fam.big ? big_theta(f2, g) : theta(f2, g);
    auto it = std::find(members.begin(), members.end(), img);
    fm.image.push_back(it == members.end() ? std::nullopt
                                           : std::optional<std::size_t>(static_cast<std::size_t>(it - members.begin())));
    fm.image_symmetric.push_back(is_symmetric(img));
  }
  std::vector<bool> done(members.size(), false);
  for (std::size_t s = 0; s < members.size(); ++s) {
    // walk from s; a cycle is found when we return to a node of this walk
    std::vector<std::size_t> path;
    std::size_t v = s;
    std::map<std::size_t, std::size_t> at;
    while (!done[v] && !at.count(v)) {
      at[v] = path.size();
      path.push_back(v);
      if (!fm.image[v]) break;
      v = *fm.image[v];
    }
    if (path.empty()) continue;
    if (fm.image[path.back()] && at.count(v) && !done[v]) {
      std::vector<std::size_t> cyc(path.begin() + static_cast<std::ptrdiff_t>(at[v]), path.end());
      std::rotate(cyc.begin(), std::min_element(cyc.begin(), cyc.end()), cyc.end());
      fm.cycles.push_back(cyc);
    }
    for (auto p : path) done[p] = true;
  }
  std::sort(fm.cycles.begin(), fm.cycles.end());
  return fm;
}

// "g_1 -> g_3 -> g_2 -> g_1"
inline std::string cycle_string(const FamilyMap& fm, const std::vector<std::size_t>& cyc) {
  std::string s;
  for (auto i : cyc) s += member_label(fm.params[i]) + " -> ";
  return s + member_label(fm.params[cyc.front()]);
}

}  // namespace cloneforge
