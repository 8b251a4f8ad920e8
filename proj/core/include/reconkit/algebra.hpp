#pragma once

#include <functional>
#include <map>

#include "reconkit/structure.hpp"

namespace reconkit {

/* Multiplicative rational character on the Plus algebra: values prescribed on
   generators, extended as an algebra morphism, unit -> 1. */
class RationalCharacter {
 public:
  void set(SymbolId gen, Rational v) { gen_[gen] = std::move(v); }

  Rational eval(const ConcreteStructure& s, SymbolId tau) const;
  Rational eval_vec(const ConcreteStructure& s, const Vec& v) const;

  const std::map<SymbolId, Rational>& generator_values() const { return gen_; }

 private:
  std::map<SymbolId, Rational> gen_;
};

/* tau/sigma: the Plus vector of right legs of sigma in the coproduct row of
   tau. Uses the comodule row for Base tau and the algebra row for Plus tau.
   Zero when sigma never appears on the left. */
Vec quotient(const ConcreteStructure& s, SymbolId tau, SymbolId sigma);

/* Polynomial-dual derivative extraction D_e^k tau := k! (tau / X_e^k), as a
   Plus vector.  Order zero contracts against the unit column (the monomial
   of order zero being the unit itself).  Zero when the monomial is absent
   from the basis or never appears on the left; rejects polynomial tau. */
Vec d_extract(const ConcreteStructure& s, SymbolId tau, int e, const MultiIndex& k);

/* Convolution product (g1 * g2)(tau) = sum over rows of g1(left) g2(right),
   returned as a character via its generator values. */
RationalCharacter convolve(const ConcreteStructure& s, const RationalCharacter& g1,
                           const RationalCharacter& g2);
Rational convolve_at(const ConcreteStructure& s, const RationalCharacter& g1,
                     const RationalCharacter& g2, SymbolId tau);

/* Convolution inverse g o antipode, again a character. */
RationalCharacter inverse_character(const ConcreteStructure& s, const RationalCharacter& g);

/* hat(g) v = (Id (x) g) Delta v for a Base vector: the degree-lowering
   triangular endomorphism attached to a character. */
Vec char_hat(const ConcreteStructure& s, const RationalCharacter& g, const Vec& v);

/* Projection onto the span of basis symbols whose homogeneity satisfies the
   predicate. */
Vec grade_project(const ConcreteStructure& s, const Vec& v,
                  const std::function<bool(const Rational&)>& pred);

/* Exhaustive exact verification of the algebraic axioms: counit and grading
   of both coproducts, coassociativity, the comodule identity (map form and
   component form), the quotient-of-coproduct identity in both spaces, both
   antipode convolution laws, random-character inverse and morphism laws, and
   triangularity of hat(g). All comparisons are exact over the rationals. */
AxiomReport check_axioms(const ConcreteStructure& s, const CheckOptions& opt = {});

}  // namespace reconkit
