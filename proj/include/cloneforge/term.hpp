#pragma once

#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "op_table.hpp"

namespace cloneforge {

/**
 * Term over the basic operations of an algebra. Three node kinds:
 *   var(i)            the variable x_{i+1}
 *   basic(j, args)    basic operation j applied to args
 *   call(body, args)  body is a term in its own variables, substituted by args
 * Nodes are shared, so terms are DAGs; `call` keeps ladders of nested
 * witnesses from being expanded.
 */
class Term {
 public:
  enum class Kind { Var, Basic, Call };

  struct Node {
    Kind kind;
    int index = 0;  // variable index or basic-op index
    std::vector<Term> args;
    std::shared_ptr<const Node> body;  // Call only
    int body_arity = 0;
    int arity = 0;  // 1 + highest variable index used
  };

  Term() = default;

  static Term var(int i) {
    if (i < 0) throw std::invalid_argument("variable index must be nonnegative");
    auto nd = std::make_shared<Node>();
    nd->kind = Kind::Var;
    nd->index = i;
    nd->arity = i + 1;
    return Term(std::move(nd));
  }

  static Term basic(int op, std::vector<Term> args) {
    auto nd = std::make_shared<Node>();
    nd->kind = Kind::Basic;
    nd->index = op;
    for (const auto& a : args) nd->arity = std::max(nd->arity, a.arity());
    nd->args = std::move(args);
    return Term(std::move(nd));
  }

  static Term call(const Term& body, int body_arity, std::vector<Term> args) {
    if (static_cast<int>(args.size()) != body_arity || body.arity() > body_arity)
      throw std::invalid_argument("call arity mismatch");
    auto nd = std::make_shared<Node>();
    nd->kind = Kind::Call;
    nd->body = body.node_;
    nd->body_arity = body_arity;
    for (const auto& a : args) nd->arity = std::max(nd->arity, a.arity());
    nd->args = std::move(args);
    return Term(std::move(nd));
  }

  // Substitute args into an existing term; collapses to the argument for a bare variable.
  static Term substitute(const Term& body, int body_arity, std::vector<Term> args) {
    if (body.kind() == Kind::Var) return args.at(static_cast<std::size_t>(body.index()));
    return call(body, body_arity, std::move(args));
  }

  Kind kind() const { return node_->kind; }
  int index() const { return node_->index; }
  int arity() const { return node_->arity; }
  const std::vector<Term>& args() const { return node_->args; }
  Term body() const { return Term(node_->body); }
  int body_arity() const { return node_->body_arity; }
  const Node* id() const { return node_.get(); }
  bool valid() const { return node_ != nullptr; }

 private:
  explicit Term(std::shared_ptr<const Node> nd) : node_(std::move(nd)) {}
  std::shared_ptr<const Node> node_;
};

inline std::vector<Term> variables(int k) {
  std::vector<Term> v;
  for (int i = 0; i < k; ++i) v.push_back(Term::var(i));
  return v;
}

namespace detail {

struct TermEvaluator {
  const Algebra& alg;
  std::map<std::pair<const Term::Node*, int>, std::vector<Elem>> memo;

  const std::vector<Elem>& eval(const Term& t, int k) {
    auto key = std::make_pair(t.id(), k);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const std::size_t size = ipow(static_cast<std::size_t>(alg.n), k);
    std::vector<Elem> out(size);
    switch (t.kind()) {
      case Term::Kind::Var: {
        if (t.index() >= k) throw std::invalid_argument("variable outside evaluation arity");
        const std::size_t stride = ipow(static_cast<std::size_t>(alg.n), k - 1 - t.index());
        for (std::size_t i = 0; i < size; ++i) out[i] = static_cast<Elem>((i / stride) % static_cast<std::size_t>(alg.n));
        break;
      }
      case Term::Kind::Basic: {
        if (t.index() < 0 || t.index() >= static_cast<int>(alg.ops.size()))
          throw std::invalid_argument("unknown basic operation");
        const OpTable& f = alg.ops[static_cast<std::size_t>(t.index())];
        if (f.arity() != static_cast<int>(t.args().size())) throw std::invalid_argument("basic op arity mismatch");
        std::vector<const std::vector<Elem>*> cols;
        for (const auto& a : t.args()) cols.push_back(&eval(a, k));
        Tuple x(cols.size());
        for (std::size_t i = 0; i < size; ++i) {
          for (std::size_t j = 0; j < cols.size(); ++j) x[j] = (*cols[j])[i];
          out[i] = f(x);
        }
        break;
      }
      case Term::Kind::Call: {
        const std::vector<Elem> body = eval(t.body(), t.body_arity());
        std::vector<const std::vector<Elem>*> cols;
        for (const auto& a : t.args()) cols.push_back(&eval(a, k));
        for (std::size_t i = 0; i < size; ++i) {
          std::size_t idx = 0;
          for (const auto* c : cols) idx = idx * static_cast<std::size_t>(alg.n) + (*c)[i];
          out[i] = body[idx];
        }
        break;
      }
    }
    return memo.emplace(key, std::move(out)).first->second;
  }
};

struct TermPrinter {
  std::map<const Term::Node*, std::string> def_names;
  std::vector<std::string> defs;

  static void count_refs(const Term& t, std::map<const Term::Node*, int>& refs) {
    if (refs[t.id()]++ > 0) return;
    for (const auto& a : t.args()) count_refs(a, refs);
  }

  std::string define(const Term& body, int arity) {
    if (auto it = def_names.find(body.id()); it != def_names.end()) return it->second;
    std::string text = scope(body);
    std::string name = "g" + std::to_string(def_names.size() + 1);
    def_names.emplace(body.id(), name);
    std::ostringstream os;
    os << "(define (" << name;
    for (int i = 0; i < arity; ++i) os << " x_" << i + 1;
    os << ") " << text << ")";
    defs.push_back(os.str());
    return name;
  }

  // Nodes referenced more than once inside one scope become let-bindings.
  std::string scope(const Term& root) {
    std::map<const Term::Node*, int> refs;
    count_refs(root, refs);
    std::map<const Term::Node*, std::string> bound;
    std::vector<std::string> lets;
    std::string body = render(root, refs, bound, lets, true);
    if (lets.empty()) return body;
    std::string s = "(let* (";
    for (std::size_t i = 0; i < lets.size(); ++i) s += (i ? " " : "") + lets[i];
    return s + ") " + body + ")";
  }

  std::string render(const Term& t, const std::map<const Term::Node*, int>& refs,
                     std::map<const Term::Node*, std::string>& bound, std::vector<std::string>& lets, bool root) {
    if (t.kind() == Term::Kind::Var) return "x_" + std::to_string(t.index() + 1);
    if (auto it = bound.find(t.id()); it != bound.end()) return it->second;
    std::string head = t.kind() == Term::Kind::Basic ? "f_" + std::to_string(t.index() + 1)
                                                     : define(t.body(), t.body_arity());
    std::string s = "(" + head;
    for (const auto& a : t.args()) s += " " + render(a, refs, bound, lets, false);
    s += ")";
    if (!root && refs.at(t.id()) > 1) {
      std::string name = "t" + std::to_string(bound.size() + 1);
      lets.push_back("(" + name + " " + s + ")");
      bound.emplace(t.id(), name);
      return name;
    }
    return s;
  }
};

}  // namespace detail

inline OpTable evaluate(const Term& t, const Algebra& alg, int arity) {
  detail::TermEvaluator ev{alg, {}};
  return OpTable(alg.n, arity, ev.eval(t, arity));
}

// Basic op j prints as f_{j+1}, variable i as x_{i+1}. Shared sub-DAGs print
// as let* bindings and called bodies as separate defines.
inline std::string to_sexpr(const Term& t) {
  detail::TermPrinter pr;
  std::string main = pr.scope(t);
  std::string out;
  for (const auto& d : pr.defs) out += d + "\n";
  return out + main;
}

inline std::size_t dag_size(const Term& t) {
  std::map<const Term::Node*, int> refs;
  std::vector<Term> stack{t};
  while (!stack.empty()) {
    Term u = stack.back();
    stack.pop_back();
    if (refs[u.id()]++ > 0) continue;
    for (const auto& a : u.args()) stack.push_back(a);
    if (u.kind() == Term::Kind::Call) stack.push_back(u.body());
  }
  return refs.size();
}

}  // namespace cloneforge
