#pragma once
// Text and JSON formats for ops, relations, algebras and CSP instances.
//
//   op <n> <k> <v_0> ... <v_{n^k-1}>        row-major table
//   rel <n> <m>                              then one tuple per line
//
// Elements are 0-based; the sign domain is - = 0, 0 = 1, + = 2.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "csp.hpp"
#include "naming.hpp"
#include "subpower.hpp"

namespace cloneforge {

using json = nlohmann::json;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Text

inline std::string op_to_text(const OpTable& f) {
  std::ostringstream os;
  os << "op " << f.domain_size() << ' ' << f.arity();
  for (Elem e : f.table()) os << ' ' << static_cast<int>(e);
  return os.str();
}

inline OpTable op_from_text(std::istream& in) {
  std::string tag;
  int n = 0, k = 0;
  if (!(in >> tag >> n >> k) || tag != "op") throw ParseError("expected 'op <n> <k> ...'");
  if (n < 1 || n > 8 || k < 1 || k > 16) throw ParseError("op header out of range");
  std::vector<Elem> t(ipow(static_cast<std::size_t>(n), k));
  for (auto& e : t) {
    int v = -1;
    if (!(in >> v)) throw ParseError("op table too short");
    if (v < 0 || v >= n) throw ParseError("op entry out of range");
    e = static_cast<Elem>(v);
  }
  return OpTable(n, k, std::move(t));
}

inline OpTable op_from_text(const std::string& s) {
  std::istringstream in(s);
  return op_from_text(in);
}

inline std::string relation_to_text(const Relation& r) {
  std::ostringstream os;
  os << "rel " << r.domain_size() << ' ' << r.arity() << '\n';
  for (const auto& t : r.tuples()) {
    for (std::size_t i = 0; i < t.size(); ++i) os << (i ? " " : "") << static_cast<int>(t[i]);
    os << '\n';
  }
  return os.str();
}

inline Relation relation_from_text(std::istream& in) {
  std::string tag;
  int n = 0, m = 0;
  if (!(in >> tag >> n >> m) || tag != "rel") throw ParseError("expected 'rel <n> <m>'");
  if (n < 1 || n > 8 || m < 1) throw ParseError("rel header out of range");
  std::vector<Tuple> ts;
  int v;
  Tuple cur;
  while (in >> v) {
    if (v < 0 || v >= n) throw ParseError("relation entry out of range");
    cur.push_back(static_cast<Elem>(v));
    if (static_cast<int>(cur.size()) == m) {
      ts.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) throw ParseError("incomplete tuple");
  return Relation(n, m, std::move(ts));
}

inline Relation relation_from_text(const std::string& s) {
  std::istringstream in(s);
  return relation_from_text(in);
}

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const OpTable& f) {
  std::vector<int> t(f.table().begin(), f.table().end());
  return {{"n", f.domain_size()}, {"arity", f.arity()}, {"table", t}};
}

inline OpTable op_from_json(const json& j, int n_default = 0) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    return n_default ? binary_from_name(s, n_default) : binary_from_name(s);
  }
  if (j.contains("name")) {
    const int n = j.value("n", n_default);
    return n ? binary_from_name(j.at("name").get<std::string>(), n) : binary_from_name(j.at("name").get<std::string>());
  }
  const int n = j.value("n", n_default);
  const int k = j.at("arity").get<int>();
  const auto t = j.at("table").get<std::vector<int>>();
  std::vector<Elem> e;
  for (int v : t) {
    if (v < 0 || v >= n) throw ParseError("op entry out of range");
    e.push_back(static_cast<Elem>(v));
  }
  return OpTable(n, k, std::move(e));
}

inline json to_json(const Relation& r) {
  json ts = json::array();
  for (const auto& t : r.tuples()) ts.push_back(std::vector<int>(t.begin(), t.end()));
  return {{"n", r.domain_size()}, {"arity", r.arity()}, {"tuples", ts}};
}

inline Tuple tuple_from_json(const json& j, int n) {
  Tuple t;
  for (int v : j.get<std::vector<int>>()) {
    if (v < 0 || v >= n) throw ParseError("tuple entry out of range");
    t.push_back(static_cast<Elem>(v));
  }
  return t;
}

inline Relation relation_from_json(const json& j, int n_default = 0) {
  const int n = j.value("n", n_default);
  std::vector<Tuple> ts;
  const json& arr = j.is_array() ? j : j.at("tuples");
  for (const auto& t : arr) ts.push_back(tuple_from_json(t, n));
  int m = j.is_object() && j.contains("arity") ? j.at("arity").get<int>() : -1;
  if (m < 0) {
    if (ts.empty()) throw ParseError("empty relation needs an arity");
    m = static_cast<int>(ts[0].size());
  }
  return Relation(n, m, std::move(ts));
}

inline json to_json(const Algebra& a) {
  json ops = json::array();
  for (const auto& f : a.ops) {
    json o = to_json(f);
    o.erase("n");
    ops.push_back(o);
  }
  return {{"n", a.n}, {"ops", ops}};
}

inline Algebra algebra_from_json(const json& j) {
  Algebra a;
  a.n = j.at("n").get<int>();
  for (const auto& o : j.at("ops")) a.ops.push_back(op_from_json(o, a.n));
  for (const auto& f : a.ops)
    if (f.domain_size() != a.n) throw ParseError("op over a different domain");
  return a;
}

inline json to_json(const CspInstance& I) {
  json cs = json::array();
  for (const auto& c : I.constraints) {
    json rel = json::array();
    for (const auto& t : c.rel.tuples()) rel.push_back(std::vector<int>(t.begin(), t.end()));
    json vs = json::array();
    for (int v : c.scope) vs.push_back(I.vars[static_cast<std::size_t>(v)]);
    cs.push_back({{"vars", vs}, {"rel", rel}});
  }
  json j{{"n", I.n}, {"vars", I.vars}, {"constraints", cs}};
  if (!I.domains.empty()) {
    json d = json::object();
    for (int x = 0; x < I.num_vars(); ++x) {
      std::vector<int> v;
      for (Elem e : set_elems(I.domains[static_cast<std::size_t>(x)])) v.push_back(e);
      d[I.vars[static_cast<std::size_t>(x)]] = v;
    }
    j["domains"] = d;
  }
  return j;
}

inline CspInstance instance_from_json(const json& j) {
  CspInstance I;
  I.n = j.at("n").get<int>();
  std::map<std::string, int> idx;
  for (const auto& v : j.at("vars")) {
    const auto name = v.is_string() ? v.get<std::string>() : std::to_string(v.get<int>());
    if (!idx.emplace(name, static_cast<int>(I.vars.size())).second) throw ParseError("duplicate variable " + name);
    I.vars.push_back(name);
  }
  auto var_index = [&](const json& v) {
    const auto name = v.is_string() ? v.get<std::string>() : std::to_string(v.get<int>());
    auto it = idx.find(name);
    if (it == idx.end()) throw ParseError("unknown variable " + name);
    return it->second;
  };
  for (const auto& c : j.at("constraints")) {
    Constraint con;
    for (const auto& v : c.at("vars")) con.scope.push_back(var_index(v));
    std::vector<Tuple> ts;
    for (const auto& t : c.at("rel")) ts.push_back(tuple_from_json(t, I.n));
    con.rel = Relation(I.n, static_cast<int>(con.scope.size()), std::move(ts));
    I.constraints.push_back(std::move(con));
  }
  if (j.contains("domains")) {
    I.domains.assign(I.vars.size(), 0);
    for (const auto& [name, vals] : j.at("domains").items())
      for (int v : vals.get<std::vector<int>>()) {
        if (v < 0 || v >= I.n) throw ParseError("domain value out of range");
        I.domains[static_cast<std::size_t>(var_index(name))] |= ElemSet{1} << v;
      }
  }
  I.validate();
  return I;
}

inline json rational_json(const Rational& q) { return q.get_str(); }

inline json to_json(const LpSolution& s) {
  json vars = json::array(), cons = json::array();
  for (const auto& p : s.var_probs) {
    json row = json::array();
    for (const auto& q : p) row.push_back(rational_json(q));
    vars.push_back(row);
  }
  for (const auto& p : s.con_probs) {
    json row = json::array();
    for (const auto& q : p) row.push_back(rational_json(q));
    cons.push_back(row);
  }
  return {{"var_probs", vars}, {"con_probs", cons}};
}

inline LpSolution lp_solution_from_json(const json& j) {
  LpSolution s;
  for (const auto& row : j.at("var_probs")) {
    std::vector<Rational> p;
    for (const auto& q : row) p.emplace_back(q.get<std::string>());
    s.var_probs.push_back(std::move(p));
  }
  for (const auto& row : j.at("con_probs")) {
    std::vector<Rational> p;
    for (const auto& q : row) p.emplace_back(q.get<std::string>());
    s.con_probs.push_back(std::move(p));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Files: JSON when the content starts with '{' or '[', text otherwise

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline bool looks_like_json(const std::string& s) {
  const auto p = s.find_first_not_of(" \t\r\n");
  return p != std::string::npos && (s[p] == '{' || s[p] == '[');
}

inline Algebra load_algebra(const std::string& path) {
  const auto s = read_file(path);
  if (looks_like_json(s)) return algebra_from_json(json::parse(s));
  std::istringstream in(s);
  Algebra a;
  while (in >> std::ws && !in.eof()) {
    a.ops.push_back(op_from_text(in));
    if (a.n == 0) a.n = a.ops.back().domain_size();
    if (a.ops.back().domain_size() != a.n) throw ParseError("op over a different domain");
  }
  if (a.ops.empty()) throw ParseError("no ops in " + path);
  return a;
}

inline Relation load_relation(const std::string& path) {
  const auto s = read_file(path);
  if (looks_like_json(s)) return relation_from_json(json::parse(s));
  return relation_from_text(s);
}

inline CspInstance load_instance(const std::string& path) { return instance_from_json(json::parse(read_file(path))); }

}  // namespace cloneforge
