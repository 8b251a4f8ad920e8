#include "reconkit/algebra.hpp"

#include <sstream>
#include <unordered_map>

#include "reconkit/rng.hpp"

namespace reconkit {

static Rational rat_pow(const Rational& x, int n) {
  Rational out = 1;
  for (int i = 0; i < n; ++i) out *= x;
  return out;
}

Rational RationalCharacter::eval(const ConcreteStructure& s, SymbolId tau) const {
  const SymbolData& sd = s.symbol(tau);
  if (sd.space != Space::Plus) fail(Errc::InvalidArgument, "character evaluated off the algebra");
  if (sd.is_unit()) return 1;
  if (sd.is_product()) {
    Rational out = 1;
    for (const auto& [fid, m] : sd.factors) out *= rat_pow(eval(s, fid), m);
    return out;
  }
  auto it = gen_.find(tau);
  if (it == gen_.end()) fail(Errc::UndefinedCharacter, "no value for generator " + sd.name);
  return it->second;
}

Rational RationalCharacter::eval_vec(const ConcreteStructure& s, const Vec& v) const {
  Rational out = 0;
  for (const auto& [id, c] : v.terms) out += c * eval(s, id);
  return out;
}

Vec quotient(const ConcreteStructure& s, SymbolId tau, SymbolId sigma) {
  Vec out(Space::Plus);
  for (const auto& t : s.row(tau))
    if (t.left == sigma) out.add(t.right, t.coeff);
  return out;
}

Vec d_extract(const ConcreteStructure& s, SymbolId tau, int e, const MultiIndex& k) {
  const SymbolData& sd = s.symbol(tau);
  if (sd.space != Space::Base)
    fail(Errc::InvalidArgument, "derivative extraction expects a comodule symbol");
  if (sd.is_poly())
    fail(Errc::InvalidArgument, "derivative extraction is undefined on polynomial symbols");
  SymbolId sigma;
  if (k.is_zero()) {
    sigma = s.unit(Space::Base);
  } else {
    sigma = s.find(Space::Base, bpoly_name(s.dim(), e, k));
    if (sigma == kNoSymbol) return Vec(Space::Plus);
  }
  Vec out(Space::Plus);
  out.add_scaled(quotient(s, tau, sigma), k.factorial_r());
  return out;
}

Rational convolve_at(const ConcreteStructure& s, const RationalCharacter& g1,
                     const RationalCharacter& g2, SymbolId tau) {
  Rational out = 0;
  for (const auto& t : s.delta_plus_row(tau)) out += t.coeff * g1.eval(s, t.left) * g2.eval(s, t.right);
  return out;
}

RationalCharacter convolve(const ConcreteStructure& s, const RationalCharacter& g1,
                           const RationalCharacter& g2) {
  RationalCharacter out;
  for (SymbolId gen : s.plus_generators()) out.set(gen, convolve_at(s, g1, g2, gen));
  return out;
}

RationalCharacter inverse_character(const ConcreteStructure& s, const RationalCharacter& g) {
  RationalCharacter out;
  for (SymbolId gen : s.plus_generators()) out.set(gen, g.eval_vec(s, s.antipode(gen)));
  return out;
}

Vec char_hat(const ConcreteStructure& s, const RationalCharacter& g, const Vec& v) {
  if (v.space != Space::Base) fail(Errc::InvalidArgument, "hat acts on Base vectors");
  Vec out(Space::Base);
  for (const auto& [tau, c] : v.terms)
    for (const auto& t : s.delta_row(tau)) out.add(t.left, c * t.coeff * g.eval(s, t.right));
  return out;
}

Vec grade_project(const ConcreteStructure& s, const Vec& v,
                  const std::function<bool(const Rational&)>& pred) {
  Vec out(v.space);
  for (const auto& [id, c] : v.terms)
    if (pred(s.symbol(id).hom)) out.add(id, c);
  return out;
}

/* --- axiom suite ---------------------------------------------------------- */

namespace {

using TripleMap = std::unordered_map<uint64_t, Rational>;

uint64_t key3(SymbolId a, SymbolId b, SymbolId c) {
  return (uint64_t(uint32_t(a)) << 42) | (uint64_t(uint32_t(b)) << 21) | uint64_t(uint32_t(c));
}

void map_add(TripleMap& m, uint64_t k, const Rational& c) {
  auto [it, fresh] = m.emplace(k, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) m.erase(it);
  }
}

bool maps_equal(const TripleMap& a, const TripleMap& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    if (it == b.end() || it->second != v) return false;
  }
  return true;
}

using PairMap = std::map<std::pair<SymbolId, SymbolId>, Rational>;

void pair_add(PairMap& m, SymbolId a, SymbolId b, const Rational& c) {
  auto [it, fresh] = m.emplace(std::make_pair(a, b), c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) m.erase(it);
  }
}

Rational random_rational(DetRng& rng) {
  int num = int(rng.index(19)) - 9;
  int den = 1 + int(rng.index(9));
  return rat(num, den);
}

RationalCharacter random_character(const ConcreteStructure& s, DetRng& rng) {
  RationalCharacter g;
  for (SymbolId gen : s.plus_generators()) g.set(gen, random_rational(rng));
  return g;
}

}  // namespace

AxiomReport check_axioms(const ConcreteStructure& s, const CheckOptions& opt) {
  AxiomReport rep;
  const SymbolId bu = s.unit(Space::Base);
  const SymbolId pu = s.unit(Space::Plus);

  auto name = [&](SymbolId id) { return s.symbol(id).name; };

  /* counit and grading of every row */
  for (Space sp : {Space::Base, Space::Plus}) {
    const SymbolId u = sp == Space::Base ? bu : pu;
    for (SymbolId tau : s.basis(sp)) {
      const auto& row = s.row(tau);
      const Rational& h = s.symbol(tau).hom;
      Vec right_unit(sp);       // sum of c * left over rows with right == unit
      Vec left_unit(Space::Plus);  // sum of c * right over rows with left == unit
      bool graded = true;
      for (const auto& t : row) {
        if (t.right == pu) right_unit.add(t.left, t.coeff);
        if (t.left == (sp == Space::Base ? bu : pu)) left_unit.add(t.right, t.coeff);
        if (s.symbol(t.left).hom + s.symbol(t.right).hom != h) graded = false;
      }
      if (!(right_unit == vec_of(sp, tau)))
        rep.fail_item("counit-right", name(tau), "unit contraction on the right is not identity");
      if (sp == Space::Plus && !(left_unit == vec_of(Space::Plus, tau)))
        rep.fail_item("counit-left", name(tau), "unit contraction on the left is not identity");
      if (!graded) rep.fail_item("grading", name(tau), "row term off the homogeneity diagonal");
    }
    rep.count(sp == Space::Base ? "counit/grading (comodule)" : "counit/grading (algebra)",
              int64_t(s.basis(sp).size()));
  }

  /* coassociativity on T+ */
  for (SymbolId tau : s.basis(Space::Plus)) {
    TripleMap lhs, rhs;
    for (const auto& t1 : s.delta_plus_row(tau))
      for (const auto& t2 : s.delta_plus_row(t1.left))
        map_add(lhs, key3(t2.left, t2.right, t1.right), t1.coeff * t2.coeff);
    for (const auto& t1 : s.delta_plus_row(tau))
      for (const auto& t2 : s.delta_plus_row(t1.right))
        map_add(rhs, key3(t1.left, t2.left, t2.right), t1.coeff * t2.coeff);
    if (!maps_equal(lhs, rhs)) rep.fail_item("coassociativity", name(tau), "triple expansions differ");
  }
  rep.count("coassociativity", int64_t(s.basis(Space::Plus).size()));

  /* right-comodule identity on T */
  for (SymbolId tau : s.basis(Space::Base)) {
    TripleMap lhs, rhs;
    for (const auto& t1 : s.delta_row(tau))
      for (const auto& t2 : s.delta_row(t1.left))
        map_add(lhs, key3(t2.left, t2.right, t1.right), t1.coeff * t2.coeff);
    for (const auto& t1 : s.delta_row(tau))
      for (const auto& t2 : s.delta_plus_row(t1.right))
        map_add(rhs, key3(t1.left, t2.left, t2.right), t1.coeff * t2.coeff);
    if (!maps_equal(lhs, rhs)) rep.fail_item("comodule", name(tau), "triple expansions differ");
  }
  rep.count("comodule", int64_t(s.basis(Space::Base).size()));

  /* comodule identity in component form: group the left expansion by the
     intermediate symbol sigma, the right expansion by the intermediate theta */
  if (opt.component_form) {
    for (SymbolId tau : s.basis(Space::Base)) {
      TripleMap lhs, rhs;
      std::map<SymbolId, Vec> by_sigma;  // sigma -> sum of c * right legs
      for (const auto& t : s.delta_row(tau)) {
        by_sigma.try_emplace(t.left, Space::Plus).first->second.add(t.right, t.coeff);
      }
      for (const auto& [sigma, rights] : by_sigma)
        for (const auto& [cc, c1] : rights.terms)
          for (const auto& t : s.delta_row(sigma)) map_add(lhs, key3(t.left, t.right, cc), c1 * t.coeff);
      std::map<SymbolId, std::map<SymbolId, Rational>> by_a;  // a -> theta -> coeff
      for (const auto& t : s.delta_row(tau)) by_a[t.left][t.right] += t.coeff;
      for (const auto& [a, thetas] : by_a)
        for (const auto& [theta, c1] : thetas)
          for (const auto& t : s.delta_plus_row(theta)) map_add(rhs, key3(a, t.left, t.right), c1 * t.coeff);
      if (!maps_equal(lhs, rhs))
        rep.fail_item("comodule-components", name(tau), "component sums differ");
    }
    rep.count("comodule-components", int64_t(s.basis(Space::Base).size()));
  }

  /* coproduct of a quotient, in both spaces */
  if (opt.quotient_lemma) {
    int64_t pairs = 0;
    for (Space sp : {Space::Base, Space::Plus}) {
      for (SymbolId tau : s.basis(sp)) {
        std::vector<SymbolId> legs;
        for (const auto& t : s.row(tau))
          if (legs.empty() || legs.back() != t.left) legs.push_back(t.left);
        std::sort(legs.begin(), legs.end());
        legs.erase(std::unique(legs.begin(), legs.end()), legs.end());
        for (SymbolId sigma : legs) {
          PairMap lhs, rhs;
          Vec q = quotient(s, tau, sigma);
          for (const auto& [mu, c] : q.terms)
            for (const auto& t : s.delta_plus_row(mu)) pair_add(lhs, t.left, t.right, c * t.coeff);
          for (SymbolId eta : legs) {
            Vec qa = quotient(s, eta, sigma);
            Vec qb = quotient(s, tau, eta);
            for (const auto& [m1, c1] : qa.terms)
              for (const auto& [m2, c2] : qb.terms) pair_add(rhs, m1, m2, c1 * c2);
          }
          if (lhs != rhs)
            rep.fail_item("quotient-coproduct", name(tau) + " / " + name(sigma),
                          "expansion of the quotient disagrees with the chain sum");
          ++pairs;
        }
      }
    }
    rep.count("quotient-coproduct", pairs);
  }

  /* antipode convolution laws, symbolically, on a scratch copy (products of
     antipode vectors may intern monomials the frozen structure lacks) */
  if (s.has_antipodes()) {
    StructureData scratch = s.data();
    for (SymbolId tau : s.basis(Space::Plus)) {
      Vec left(Space::Plus), right(Space::Plus);
      for (const auto& t : s.delta_plus_row(tau)) {
        left.add_scaled(vec_mul(scratch, s.antipode(t.left), vec_of(Space::Plus, t.right), false),
                        t.coeff);
        right.add_scaled(vec_mul(scratch, vec_of(Space::Plus, t.left), s.antipode(t.right), false),
                         t.coeff);
      }
      Vec expect = tau == pu ? vec_of(Space::Plus, pu) : Vec(Space::Plus);
      if (!(left == expect))
        rep.fail_item("antipode-left", name(tau), "antipode * id misses the counit projector");
      if (!(right == expect))
        rep.fail_item("antipode-right", name(tau), "id * antipode misses the counit projector");
    }
    rep.count("antipode convolution", int64_t(s.basis(Space::Plus).size()));
  } else {
    rep.fail_item("antipode", "(table)", "antipode table absent");
  }

  /* random characters: inverse laws, morphism law for hat, triangularity */
  if (opt.random_characters > 0 && s.has_antipodes()) {
    DetRng rng(opt.seed);
    for (int trial = 0; trial < opt.random_characters; ++trial) {
      RationalCharacter g = random_character(s, rng);
      RationalCharacter gi = inverse_character(s, g);
      for (SymbolId tau : s.basis(Space::Plus)) {
        Rational want = tau == pu ? 1 : 0;
        if (convolve_at(s, g, gi, tau) != want) {
          rep.fail_item("character-inverse", name(tau),
                        "g * g^{-1} fails on trial " + std::to_string(trial));
          break;
        }
        if (convolve_at(s, gi, g, tau) != want) {
          rep.fail_item("character-inverse", name(tau),
                        "g^{-1} * g fails on trial " + std::to_string(trial));
          break;
        }
      }

      RationalCharacter g2 = random_character(s, rng);
      RationalCharacter g12 = convolve(s, g, g2);
      for (SymbolId tau : s.basis(Space::Base)) {
        /* hat(g) hat(g2) tau == hat(g * g2) tau */
        Vec inner = char_hat(s, g2, vec_of(Space::Base, tau));
        Vec lhs = char_hat(s, g, inner);
        Vec rhs = char_hat(s, g12, vec_of(Space::Base, tau));
        if (!(lhs == rhs)) {
          rep.fail_item("hat-morphism", name(tau), "composition differs from convolution");
          break;
        }
        /* hat(g) tau - tau is strictly lower order */
        Vec diff = char_hat(s, g, vec_of(Space::Base, tau));
        diff.add(tau, -1);
        for (const auto& [id, c] : diff.terms)
          if (s.symbol(id).hom >= s.symbol(tau).hom) {
            rep.fail_item("hat-triangular", name(tau), "hat does not lower the grade");
            break;
          }
      }
    }
    rep.count("random characters", opt.random_characters);
  }

  return rep;
}

}  // namespace reconkit
