#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "reconkit/rational.hpp"

namespace reconkit {

/* The two graded spaces of a concrete structure: the comodule side T (symbols
   realized as distributions) and the character side T+ (group-like algebra). */
enum class Space : uint8_t { Base, Plus };

enum class SymbolKind : uint8_t {
  Unit,            // empty product; one per space
  Noise,           // named generator of T with prescribed homogeneity
  BPoly,           // chart-local bounded monomial in T, exponent >= 1
  Integrated,      // kernel integration of a T symbol, lives in T
  Coordinate,      // chart-local coordinate function, degree-1 generator of T+
  IntegratedPlus,  // derivative-decorated integration generator of T+
  Product,         // commutative product; factors with multiplicities
};

using SymbolId = int32_t;
constexpr SymbolId kNoSymbol = -1;

/* Exponent multi-index over at most two axes. */
struct MultiIndex {
  std::array<uint8_t, 2> k{0, 0};

  int order() const { return int(k[0]) + int(k[1]); }
  bool is_zero() const { return k[0] == 0 && k[1] == 0; }
  bool operator==(const MultiIndex&) const = default;
  bool leq(const MultiIndex& o) const { return k[0] <= o.k[0] && k[1] <= o.k[1]; }

  MultiIndex minus(const MultiIndex& o) const {
    return MultiIndex{{uint8_t(k[0] - o.k[0]), uint8_t(k[1] - o.k[1])}};
  }
  MultiIndex plus(const MultiIndex& o) const {
    return MultiIndex{{uint8_t(k[0] + o.k[0]), uint8_t(k[1] + o.k[1])}};
  }

  /* All indices l with l <= this, lexicographic. */
  std::vector<MultiIndex> sub_indices(int dim) const {
    std::vector<MultiIndex> out;
    for (int a = 0; a <= k[0]; ++a) {
      if (dim == 1) {
        out.push_back(MultiIndex{{uint8_t(a), 0}});
      } else {
        for (int b = 0; b <= k[1]; ++b) out.push_back(MultiIndex{{uint8_t(a), uint8_t(b)}});
      }
    }
    return out;
  }

  Rational factorial_r() const { return Rational(factorial(k[0]) * factorial(k[1])); }

  std::string str(int dim) const {
    if (dim == 1) return std::to_string(int(k[0]));
    return "(" + std::to_string(int(k[0])) + "," + std::to_string(int(k[1])) + ")";
  }
};

/* Binomial coefficient of multi-indices, product over axes. */
inline Rational mi_binomial(const MultiIndex& k, const MultiIndex& l) {
  return binomial(k.k[0], l.k[0]) * binomial(k.k[1], l.k[1]);
}

/* All multi-indices of total order <= max_order (empty when negative),
   ordered by total order then lexicographically. */
inline std::vector<MultiIndex> indices_up_to(int dim, int max_order) {
  std::vector<MultiIndex> out;
  for (int n = 0; n <= max_order; ++n) {
    if (dim == 1) {
      out.push_back(MultiIndex{{uint8_t(n), 0}});
    } else {
      for (int a = n; a >= 0; --a) out.push_back(MultiIndex{{uint8_t(a), uint8_t(n - a)}});
    }
  }
  return out;
}

struct SymbolData {
  SymbolKind kind = SymbolKind::Unit;
  Space space = Space::Base;
  Rational hom = 0;

  int32_t noise = -1;   // Noise: index into noise name table
  int32_t chart = -1;   // BPoly / Coordinate / IntegratedPlus
  int32_t axis = -1;    // Coordinate
  MultiIndex mindex{};  // BPoly / IntegratedPlus
  SymbolId inner = kNoSymbol;  // Integrated / IntegratedPlus: the integrated Base symbol

  /* Product factors as (id, multiplicity), sorted by factor name. Non-product
     symbols leave this empty. */
  std::vector<std::pair<SymbolId, int32_t>> factors;

  std::string name;  // canonical, unique within its space

  bool is_product() const { return kind == SymbolKind::Product; }
  bool is_unit() const { return kind == SymbolKind::Unit; }
  /* Purely polynomial Base symbols: integration annihilates them. */
  bool is_poly() const { return kind == SymbolKind::Unit || kind == SymbolKind::BPoly; }
  bool is_plus_generator() const {
    return kind == SymbolKind::Coordinate || kind == SymbolKind::IntegratedPlus;
  }
};

/* One term of a coproduct row: coeff * (left tensor right). For the comodule
   coproduct left is a Base id and right a Plus id; for the algebra coproduct
   both are Plus ids. */
struct CoTerm {
  SymbolId left = kNoSymbol;
  SymbolId right = kNoSymbol;
  Rational coeff = 0;
};

}  // namespace reconkit
