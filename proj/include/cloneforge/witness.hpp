#pragma once

#include <string>

#include "op_table.hpp"
#include "term.hpp"

namespace cloneforge {

struct Witness {
  int arity = 1;
  OpTable table;
  Term term;
  std::string method;
};

inline Witness projection_witness(int n) { return {1, OpTable::projection(n, 1, 0), Term::var(0), "projection"}; }

}  // namespace cloneforge
