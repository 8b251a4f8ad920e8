#pragma once

#include <map>
#include <utility>

#include "doctest.h"
#include "reconkit/algebra.hpp"
#include "reconkit/builders.hpp"

namespace rktest {

using namespace reconkit;

/* The running example used across the suites: one rough noise under a
   second-order kernel with quadratic and cubic interactions. */
inline TreeStructureSpec running_recipe() {
  TreeStructureSpec spec;
  spec.dim = 1;
  spec.theta = 1;
  spec.cutoff = 2;
  spec.noises = {{"Xi", rat(-5, 8)}};
  spec.products = {{"I(Xi)", "I(Xi)"}, {"I(Xi)", "I(Xi)", "I(Xi)"}, {"Xi", "I(Xi)", "I(Xi)"}};
  spec.poly_degree = 1;
  return spec;
}

template <typename F>
void check_error(F&& f, Errc kind) {
  bool threw = false;
  try {
    f();
  } catch (const Error& e) {
    threw = true;
    CHECK(e.kind() == kind);
  }
  CHECK(threw);
}

/* rows as order-independent maps for comparisons */
inline std::map<std::pair<SymbolId, SymbolId>, Rational> row_map(const std::vector<CoTerm>& row) {
  std::map<std::pair<SymbolId, SymbolId>, Rational> m;
  for (const auto& t : row) {
    auto [it, fresh] = m.emplace(std::make_pair(t.left, t.right), t.coeff);
    if (!fresh) it->second += t.coeff;
  }
  return m;
}

}  // namespace rktest
