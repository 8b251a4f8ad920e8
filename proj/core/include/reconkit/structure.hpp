#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "reconkit/errors.hpp"
#include "reconkit/symbols.hpp"

namespace reconkit {

/* A formal rational linear combination of symbols in one space. */
struct Vec {
  Space space = Space::Base;
  std::map<SymbolId, Rational> terms;  // zero coefficients pruned

  Vec() = default;
  explicit Vec(Space s) : space(s) {}

  void add(SymbolId id, const Rational& c) {
    if (c == 0) return;
    auto [it, fresh] = terms.emplace(id, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms.erase(it);
    }
  }
  void add_scaled(const Vec& v, const Rational& c) {
    for (const auto& [id, a] : v.terms) add(id, a * c);
  }
  bool is_zero() const { return terms.empty(); }
  bool operator==(const Vec&) const = default;
};

inline Vec vec_of(Space s, SymbolId id, const Rational& c = 1) {
  Vec v(s);
  v.add(id, c);
  return v;
}

/* Mutable holder for a structure under construction (or loaded from disk, or
   deliberately perturbed by tests). ConcreteStructure freezes one of these. */
struct StructureData {
  int dim = 1;
  Rational theta = 1;                        // kernel order
  std::vector<std::vector<Rational>> charts;  // 4^dim quarter-lattice offsets
  std::vector<std::string> noise_names;

  std::vector<SymbolData> symbols;  // shared id space for both Space values
  std::vector<SymbolId> base_basis;
  std::vector<SymbolId> plus_basis;       // symbols carrying algebra-coproduct rows
  std::vector<SymbolId> plus_generators;  // Coordinate + IntegratedPlus ids

  /* Coproduct rows indexed by symbol id; empty vector when not applicable.
     delta: Base -> Base (x) Plus.  delta_plus: Plus -> Plus (x) Plus. */
  std::vector<std::vector<CoTerm>> delta;
  std::vector<std::vector<CoTerm>> delta_plus;

  /* Lookup key -> id; key is "<space tag><name>". Rebuilt on demand. */
  std::unordered_map<std::string, SymbolId> index;

  static std::string key(Space s, const std::string& name) {
    return (s == Space::Plus ? "+" : "-") + name;
  }

  void rebuild_index() {
    index.clear();
    for (SymbolId i = 0; i < SymbolId(symbols.size()); ++i)
      index.emplace(key(symbols[i].space, symbols[i].name), i);
  }

  SymbolId find(Space s, const std::string& name) const {
    auto it = index.find(key(s, name));
    return it == index.end() ? kNoSymbol : it->second;
  }

  /* Appends a symbol, keeping the index and row tables in step. Fails if the
     canonical name is already taken in that space. */
  SymbolId intern(SymbolData sd) {
    if (find(sd.space, sd.name) != kNoSymbol)
      fail(Errc::InvalidArgument, "duplicate symbol name: " + sd.name);
    SymbolId id = SymbolId(symbols.size());
    index.emplace(key(sd.space, sd.name), id);
    symbols.push_back(std::move(sd));
    delta.emplace_back();
    delta_plus.emplace_back();
    return id;
  }

  int chart_count() const { return int(charts.size()); }
};

/* Options for the exact axiom suite. */
struct CheckOptions {
  int random_characters = 100;
  uint64_t seed = 19937;
  bool quotient_lemma = true;
  bool component_form = true;
};

struct CheckItem {
  std::string check;    // which axiom family
  std::string witness;  // symbol or pair where it failed
  std::string detail;
};

struct AxiomReport {
  bool ok = true;
  std::vector<CheckItem> failures;
  std::vector<std::pair<std::string, int64_t>> counts;  // check name -> instances verified

  void count(const std::string& name, int64_t n) {
    for (auto& [k, v] : counts)
      if (k == name) {
        v += n;
        return;
      }
    counts.emplace_back(name, n);
  }
  void fail_item(const std::string& check, const std::string& witness, const std::string& detail) {
    ok = false;
    failures.push_back({check, witness, detail});
  }
  std::string summary() const;
};

struct ValidationReport {
  bool ok = true;
  std::vector<CheckItem> failures;
  void fail_item(const std::string& check, const std::string& witness, const std::string& detail) {
    ok = false;
    failures.push_back({check, witness, detail});
  }
  std::string summary() const;
};

/* Immutable frozen structure. Construction computes the antipode table for
   every Plus basis symbol (interning product symbols the antipode alone
   reaches; those carry no coproduct rows and are excluded from plus_basis). */
class ConcreteStructure {
 public:
  /* compute_antipodes=false leaves the antipode table empty; used by tests
     that freeze deliberately broken data. */
  explicit ConcreteStructure(StructureData data, bool compute_antipodes = true);

  int dim() const { return d_->dim; }
  const Rational& theta() const { return d_->theta; }
  int chart_count() const { return d_->chart_count(); }
  const std::vector<Rational>& chart(int e) const { return d_->charts[e]; }
  const std::vector<std::string>& noise_names() const { return d_->noise_names; }

  int symbol_count() const { return int(d_->symbols.size()); }
  const SymbolData& symbol(SymbolId id) const { return d_->symbols[id]; }
  const std::vector<SymbolId>& basis(Space s) const {
    return s == Space::Base ? d_->base_basis : d_->plus_basis;
  }
  const std::vector<SymbolId>& plus_generators() const { return d_->plus_generators; }

  SymbolId find(Space s, const std::string& name) const { return d_->find(s, name); }
  SymbolId require(Space s, const std::string& name) const {
    SymbolId id = d_->find(s, name);
    if (id == kNoSymbol) fail(Errc::NotInBasis, "no such symbol: " + name);
    return id;
  }
  SymbolId unit(Space s) const { return s == Space::Base ? base_unit_ : plus_unit_; }

  /* Comodule coproduct row of a Base symbol. */
  const std::vector<CoTerm>& delta_row(SymbolId id) const;
  /* Algebra coproduct row of a Plus basis symbol. */
  const std::vector<CoTerm>& delta_plus_row(SymbolId id) const;
  /* Either row by the symbol's space; the uniform view used by machinery that
     runs identically over T and T+. */
  const std::vector<CoTerm>& row(SymbolId id) const {
    return d_->symbols[id].space == Space::Base ? delta_row(id) : delta_plus_row(id);
  }

  /* Antipode of a Plus basis symbol, as a Plus vector. */
  const Vec& antipode(SymbolId id) const;
  bool has_antipodes() const { return !antipode_.empty(); }

  const StructureData& data() const { return *d_; }

  /* Stable content hash of the canonical serialization (used to pair model
     files with the structure that produced them). */
  uint64_t content_hash() const { return hash_; }

  /* Distinct homogeneities of the Base basis, ascending. */
  const std::vector<Rational>& base_levels() const { return base_levels_; }

 private:
  std::shared_ptr<const StructureData> d_;
  SymbolId base_unit_ = kNoSymbol;
  SymbolId plus_unit_ = kNoSymbol;
  std::vector<Vec> antipode_;  // by symbol id; empty Vec for Base ids
  std::vector<Rational> base_levels_;
  uint64_t hash_ = 0;
};

/* --- canonical naming and ordering ------------------------------------- */

std::string chart_label(int e);  // "e0", "e1", ...
std::string bpoly_name(int dim, int e, const MultiIndex& k);
std::string coordinate_name(int e, int axis);
std::string integrated_name(const std::string& inner);
std::string integrated_plus_name(int dim, const MultiIndex& k, int e, const std::string& inner);
std::string product_name(const std::vector<std::pair<std::string, int32_t>>& named_factors);

/* Reassigns ids so serialization order is content-determined: Base space
   first, then homogeneity ascending, then kind, then name. Rewrites every id
   reference in rows and factor lists. */
void canonicalize_ids(StructureData& sd);

/* Canonical product interning on mutable data: merges unit and same-chart
   BPoly factors, collapses singletons, returns existing id when present.
   rows=false marks the symbol as antipode-closure-only (kept out of
   plus_basis; no coproduct row is ever computed for it). */
SymbolId intern_product(StructureData& sd, Space space,
                        std::vector<std::pair<SymbolId, int32_t>> factors, bool rows = true);

/* Product of two Plus vectors (bilinear monomial merge). Build-time only:
   may intern new product symbols. */
Vec vec_mul(StructureData& sd, const Vec& a, const Vec& b, bool rows = true);

}  // namespace reconkit
