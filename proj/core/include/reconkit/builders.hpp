#pragma once

#include <string>
#include <utility>
#include <vector>

#include "reconkit/structure.hpp"

namespace reconkit {

/* Recipe for a tree-type structure: noises with homogeneities, a kernel
   order, literal product rules, and a truncation cutoff. The builder closes
   the rule set under integration (below the cutoff), coproduct legs, and
   polynomial decorations. */
struct TreeStructureSpec {
  int dim = 1;
  Rational theta = 1;
  Rational cutoff = 2;  // symbols admitted while homogeneity < cutoff
  std::vector<std::pair<std::string, Rational>> noises;
  std::vector<std::vector<std::string>> products;  // factor terms, e.g. {"Xi","I(Xi)"}
  int poly_degree = 0;   // request bounded monomials up to this order per chart
  int max_deriv = -1;    // cap on plus-generator derivative order; -1 = unlimited
};

/* Free bounded-polynomial structure: T spanned by chart monomials of order
   below degree_bound, T+ the free commutative algebra over chart coordinates
   truncated at the same order. */
ConcreteStructure build_polynomial_structure(int dim, int degree_bound);

ConcreteStructure build_tree_structure(const TreeStructureSpec& spec);

/* Structural conformance of frozen data: recomputes every coproduct row from
   the defining formulas and rechecks homogeneity bookkeeping, chart indices,
   product factorizations, and the generator shape of quotients. */
ValidationReport validate_assumptions(const ConcreteStructure& s);

}  // namespace reconkit
