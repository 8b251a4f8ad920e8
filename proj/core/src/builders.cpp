#include "reconkit/builders.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace reconkit {

namespace {

constexpr size_t kSymbolBudget = 500000;

std::vector<std::vector<Rational>> make_charts(int dim) {
  std::vector<std::vector<Rational>> out;
  if (dim == 1) {
    for (int a = 0; a < 4; ++a) out.push_back({rat(a, 4)});
  } else {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) out.push_back({rat(a, 4), rat(b, 4)});
  }
  return out;
}

SymbolId intern_unit(StructureData& sd, Space sp) {
  SymbolId id = sd.find(sp, "1");
  if (id != kNoSymbol) return id;
  SymbolData u;
  u.kind = SymbolKind::Unit;
  u.space = sp;
  u.hom = 0;
  u.name = "1";
  return sd.intern(std::move(u));
}

SymbolId intern_coordinate(StructureData& sd, int e, int axis) {
  std::string nm = coordinate_name(e, axis);
  SymbolId id = sd.find(Space::Plus, nm);
  if (id != kNoSymbol) return id;
  SymbolData c;
  c.kind = SymbolKind::Coordinate;
  c.space = Space::Plus;
  c.hom = 1;
  c.chart = e;
  c.axis = axis;
  c.name = std::move(nm);
  return sd.intern(std::move(c));
}

SymbolId intern_bpoly(StructureData& sd, int e, const MultiIndex& k) {
  std::string nm = bpoly_name(sd.dim, e, k);
  SymbolId id = sd.find(Space::Base, nm);
  if (id != kNoSymbol) return id;
  SymbolData b;
  b.kind = SymbolKind::BPoly;
  b.space = Space::Base;
  b.hom = k.order();
  b.chart = e;
  b.mindex = k;
  b.name = std::move(nm);
  return sd.intern(std::move(b));
}

/* Chart monomial in T+: product of coordinate powers. Order zero is the unit. */
SymbolId xmono(StructureData& sd, int e, const MultiIndex& l) {
  std::vector<std::pair<SymbolId, int32_t>> fs;
  for (int axis = 0; axis < sd.dim; ++axis)
    if (l.k[axis] > 0) fs.emplace_back(intern_coordinate(sd, e, axis), l.k[axis]);
  return intern_product(sd, Space::Plus, std::move(fs));
}

SymbolId intern_integrated(StructureData& sd, SymbolId inner) {
  const SymbolData& in = sd.symbols[inner];
  if (in.space != Space::Base) fail(Errc::InvalidArgument, "integration acts on Base symbols");
  if (in.is_poly()) fail(Errc::InvalidArgument, "integration of a polynomial symbol is null");
  std::string nm = integrated_name(in.name);
  SymbolId id = sd.find(Space::Base, nm);
  if (id != kNoSymbol) return id;
  SymbolData s;
  s.kind = SymbolKind::Integrated;
  s.space = Space::Base;
  s.hom = in.hom + sd.theta;
  s.inner = inner;
  s.name = std::move(nm);
  return sd.intern(std::move(s));
}

/* Null below and at homogeneity zero: returns kNoSymbol in that case. */
SymbolId intern_iplus(StructureData& sd, SymbolId inner, const MultiIndex& k, int e) {
  const SymbolData& in = sd.symbols[inner];
  Rational hom = in.hom + sd.theta - k.order();
  if (hom <= 0) return kNoSymbol;
  std::string nm = integrated_plus_name(sd.dim, k, e, in.name);
  SymbolId id = sd.find(Space::Plus, nm);
  if (id != kNoSymbol) return id;
  SymbolData s;
  s.kind = SymbolKind::IntegratedPlus;
  s.space = Space::Plus;
  s.hom = hom;
  s.chart = e;
  s.mindex = k;
  s.inner = inner;
  s.name = std::move(nm);
  return sd.intern(std::move(s));
}

struct BuildCtx {
  int max_deriv = -1;  // -1: unlimited
};

void ensure_row(StructureData& sd, const BuildCtx& ctx, SymbolId id);

using RowMap = std::map<std::pair<SymbolId, SymbolId>, Rational>;

void row_add(RowMap& m, SymbolId l, SymbolId r, const Rational& c) {
  auto [it, fresh] = m.emplace(std::make_pair(l, r), c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) m.erase(it);
  }
}

std::vector<CoTerm> row_emit(const RowMap& m) {
  std::vector<CoTerm> out;
  out.reserve(m.size());
  for (const auto& [lr, c] : m) out.push_back({lr.first, lr.second, c});
  return out;
}

/* Row of a commutative product: termwise product of the factor rows. Left
   legs multiply in the product's own space, right legs in T+. */
std::vector<CoTerm> product_row(StructureData& sd, const BuildCtx& ctx, Space sp,
                                const std::vector<std::pair<SymbolId, int32_t>>& factors) {
  RowMap acc;
  row_add(acc, intern_unit(sd, sp), intern_unit(sd, Space::Plus), 1);
  for (const auto& [fid, m] : factors) {
    ensure_row(sd, ctx, fid);
    const auto& frow = sd.symbols[fid].space == Space::Base ? sd.delta[fid] : sd.delta_plus[fid];
    for (int rep = 0; rep < m; ++rep) {
      RowMap next;
      for (const auto& [lr, c] : acc) {
        for (const auto& t : frow) {
          SymbolId left = intern_product(sd, sp, {{lr.first, 1}, {t.left, 1}});
          SymbolId right = intern_product(sd, Space::Plus, {{lr.second, 1}, {t.right, 1}});
          row_add(next, left, right, c * t.coeff);
        }
      }
      acc = std::move(next);
    }
  }
  return row_emit(acc);
}

std::vector<CoTerm> compute_row(StructureData& sd, const BuildCtx& ctx, SymbolId id) {
  const SymbolData sym = sd.symbols[id];  // copy: interning may reallocate
  const SymbolId pu = intern_unit(sd, Space::Plus);
  switch (sym.kind) {
    case SymbolKind::Unit:
      return {{id, pu, 1}};
    case SymbolKind::Noise:
      return {{id, pu, 1}};
    case SymbolKind::Coordinate:
      return {{pu, id, 1}, {id, pu, 1}};
    case SymbolKind::BPoly: {
      RowMap acc;
      for (const MultiIndex& l : indices_up_to(sd.dim, sym.mindex.order())) {
        if (!l.leq(sym.mindex)) continue;
        SymbolId left = l.is_zero() ? intern_unit(sd, Space::Base) : intern_bpoly(sd, sym.chart, l);
        SymbolId right = xmono(sd, sym.chart, sym.mindex.minus(l));
        row_add(acc, left, right, mi_binomial(sym.mindex, l));
      }
      return row_emit(acc);
    }
    case SymbolKind::Integrated: {
      ensure_row(sd, ctx, sym.inner);
      RowMap acc;
      for (const auto& t : sd.delta[sym.inner]) {
        if (sd.symbols[t.left].is_poly()) continue;
        row_add(acc, intern_integrated(sd, t.left), t.right, t.coeff);
      }
      const Rational bound = sd.symbols[sym.inner].hom + sd.theta;
      const int maxord = max_order_below(bound);
      if (ctx.max_deriv >= 0 && maxord > ctx.max_deriv)
        fail(Errc::InvalidArgument,
             "max_deriv cap breaks coproduct closure at " + sym.name);
      for (int e = 0; e < sd.chart_count(); ++e) {
        for (const MultiIndex& l : indices_up_to(sd.dim, maxord)) {
          SymbolId ip = intern_iplus(sd, sym.inner, l, e);
          if (ip == kNoSymbol) continue;
          SymbolId left = l.is_zero() ? intern_unit(sd, Space::Base) : intern_bpoly(sd, e, l);
          row_add(acc, left, ip, Rational(1) / l.factorial_r());
        }
      }
      return row_emit(acc);
    }
    case SymbolKind::IntegratedPlus: {
      ensure_row(sd, ctx, sym.inner);
      RowMap acc;
      for (const auto& t : sd.delta[sym.inner]) {
        if (sd.symbols[t.left].is_poly()) continue;
        SymbolId ip = intern_iplus(sd, t.left, sym.mindex, sym.chart);
        if (ip == kNoSymbol) continue;
        row_add(acc, ip, t.right, t.coeff);
      }
      const Rational bound = sd.symbols[sym.inner].hom + sd.theta;
      const int maxord = max_order_below(bound);
      if (ctx.max_deriv >= 0 && maxord > ctx.max_deriv)
        fail(Errc::InvalidArgument,
             "max_deriv cap breaks coproduct closure at " + sym.name);
      for (const MultiIndex& l : indices_up_to(sd.dim, maxord - sym.mindex.order())) {
        SymbolId ip = intern_iplus(sd, sym.inner, sym.mindex.plus(l), sym.chart);
        if (ip == kNoSymbol) continue;
        row_add(acc, xmono(sd, sym.chart, l), ip, Rational(1) / l.factorial_r());
      }
      return row_emit(acc);
    }
    case SymbolKind::Product:
      return product_row(sd, ctx, sym.space, sym.factors);
  }
  fail(Errc::InvalidArgument, "unknown symbol kind");
}

void ensure_row(StructureData& sd, const BuildCtx& ctx, SymbolId id) {
  auto& table = sd.symbols[id].space == Space::Base ? sd.delta : sd.delta_plus;
  if (!table[id].empty()) return;
  auto row = compute_row(sd, ctx, id);
  /* compute_row may have grown the tables */
  auto& table2 = sd.symbols[id].space == Space::Base ? sd.delta : sd.delta_plus;
  table2[id] = std::move(row);
  if (sd.symbols.size() > kSymbolBudget)
    fail(Errc::ResourceLimit, "structure closure exceeds the symbol budget");
}

void fill_basis_lists(StructureData& sd) {
  sd.base_basis.clear();
  sd.plus_basis.clear();
  sd.plus_generators.clear();
  for (SymbolId id = 0; id < SymbolId(sd.symbols.size()); ++id) {
    if (sd.symbols[id].space == Space::Base)
      sd.base_basis.push_back(id);
    else
      sd.plus_basis.push_back(id);
    if (sd.symbols[id].is_plus_generator()) sd.plus_generators.push_back(id);
  }
}

/* --- product rule terms --------------------------------------------------- */

struct TermParser {
  const std::string& src;
  size_t pos = 0;

  explicit TermParser(const std::string& s) : src(s) {}

  void skip_ws() {
    while (pos < src.size() && src[pos] == ' ') ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void err(const std::string& what) {
    fail(Errc::ParseError, "bad product term '" + src + "': " + what);
  }

  SymbolId parse_term(StructureData& sd, const BuildCtx& ctx, const Rational& cutoff) {
    std::vector<std::pair<SymbolId, int32_t>> factors;
    do {
      factors.push_back(parse_factor(sd, ctx, cutoff));
    } while (eat('*'));
    if (factors.size() == 1 && factors[0].second == 1) return factors[0].first;
    SymbolId id = intern_product(sd, Space::Base, std::move(factors));
    if (sd.symbols[id].hom >= cutoff)
      fail(Errc::InvalidArgument, "product rule exceeds the truncation cutoff: " + src);
    return id;
  }

  std::pair<SymbolId, int32_t> parse_factor(StructureData& sd, const BuildCtx& ctx,
                                            const Rational& cutoff) {
    SymbolId atom = parse_atom(sd, ctx, cutoff);
    int32_t power = 1;
    if (eat('^')) {
      skip_ws();
      size_t start = pos;
      while (pos < src.size() && isdigit(uint8_t(src[pos]))) ++pos;
      if (start == pos) err("exponent expected after '^'");
      power = std::stoi(src.substr(start, pos - start));
      if (power < 1 || power > 64) err("exponent out of range");
    }
    return {atom, power};
  }

  SymbolId parse_atom(StructureData& sd, const BuildCtx& ctx, const Rational& cutoff) {
    skip_ws();
    if (pos < src.size() && src[pos] == 'I' && pos + 1 < src.size() && src[pos + 1] == '(') {
      pos += 2;
      SymbolId inner = parse_term(sd, ctx, cutoff);
      if (!eat(')')) err("missing ')'");
      if (sd.symbols[inner].is_poly())
        fail(Errc::InvalidArgument, "integration of a polynomial symbol is null: " + src);
      SymbolId id = intern_integrated(sd, inner);
      if (sd.symbols[id].hom >= cutoff)
        fail(Errc::InvalidArgument, "rule factor exceeds the truncation cutoff: " + src);
      return id;
    }
    size_t start = pos;
    while (pos < src.size() && (isalnum(uint8_t(src[pos])) || src[pos] == '_')) ++pos;
    if (start == pos) err("symbol name expected");
    std::string name = src.substr(start, pos - start);
    SymbolId id = sd.find(Space::Base, name);
    if (id == kNoSymbol) fail(Errc::NotInBasis, "unknown symbol in product rule: " + name);
    return id;
  }
};

void check_noise_name(const std::string& name) {
  if (name.empty()) fail(Errc::InvalidArgument, "empty noise name");
  // generated names follow the shapes 1, X_e…, x_e…/y_e…, I(…), I<k>+_e…(…)
  bool reserved = name == "1" || name == "I" || name.rfind("X_", 0) == 0 ||
                  name.rfind("x_", 0) == 0 || name.rfind("y_", 0) == 0 ||
                  (name[0] == 'I' && name.size() > 1 && isdigit(uint8_t(name[1])));
  if (reserved)
    fail(Errc::InvalidArgument, "noise name collides with reserved prefixes: " + name);
  if (!isalpha(uint8_t(name[0])) && name[0] != '_')
    fail(Errc::InvalidArgument, "noise name must start with a letter: " + name);
  for (char c : name)
    if (!isalnum(uint8_t(c)) && c != '_')
      fail(Errc::InvalidArgument, "noise name has illegal characters: " + name);
}

}  // namespace

ConcreteStructure build_polynomial_structure(int dim, int degree_bound) {
  if (dim != 1 && dim != 2) fail(Errc::InvalidArgument, "dimension must be 1 or 2");
  if (degree_bound < 1 || degree_bound > 16)
    fail(Errc::InvalidArgument, "degree bound out of range [1,16]");

  StructureData sd;
  sd.dim = dim;
  sd.theta = 1;
  sd.charts = make_charts(dim);
  intern_unit(sd, Space::Base);
  intern_unit(sd, Space::Plus);

  const int top = degree_bound - 1;  // homogeneity < degree_bound
  std::vector<SymbolId> coords;
  for (int e = 0; e < sd.chart_count(); ++e)
    for (int axis = 0; axis < dim; ++axis) coords.push_back(intern_coordinate(sd, e, axis));
  for (int e = 0; e < sd.chart_count(); ++e)
    for (const MultiIndex& k : indices_up_to(dim, top))
      if (!k.is_zero()) intern_bpoly(sd, e, k);

  /* free commutative monomials over the coordinates, total degree <= top */
  std::vector<std::pair<SymbolId, int32_t>> stack;
  auto rec = [&](auto&& self, size_t i, int remaining) -> void {
    if (stack.size() >= 2 || (stack.size() == 1 && stack[0].second >= 2))
      intern_product(sd, Space::Plus, stack);
    if (sd.symbols.size() > kSymbolBudget)
      fail(Errc::ResourceLimit, "polynomial structure exceeds the symbol budget");
    if (i == coords.size() || remaining == 0) return;
    self(self, i + 1, remaining);
    for (int m = 1; m <= remaining; ++m) {
      stack.emplace_back(coords[i], m);
      self(self, i + 1, remaining - m);
      stack.pop_back();
    }
  };
  rec(rec, 0, top);

  BuildCtx ctx;
  for (SymbolId id = 0; id < SymbolId(sd.symbols.size()); ++id) ensure_row(sd, ctx, id);
  fill_basis_lists(sd);
  canonicalize_ids(sd);
  return ConcreteStructure(std::move(sd));
}

ConcreteStructure build_tree_structure(const TreeStructureSpec& spec) {
  if (spec.dim != 1 && spec.dim != 2) fail(Errc::InvalidArgument, "dimension must be 1 or 2");
  if (spec.theta <= 0) fail(Errc::InvalidArgument, "kernel order must be positive");
  if (spec.cutoff <= 0) fail(Errc::InvalidArgument, "cutoff must be positive");
  if (spec.noises.empty()) fail(Errc::InvalidArgument, "at least one noise is required");
  if (spec.poly_degree < 0 || spec.poly_degree > 16)
    fail(Errc::InvalidArgument, "poly_degree out of range [0,16]");

  StructureData sd;
  sd.dim = spec.dim;
  sd.theta = spec.theta;
  sd.charts = make_charts(spec.dim);
  intern_unit(sd, Space::Base);
  intern_unit(sd, Space::Plus);
  for (int e = 0; e < sd.chart_count(); ++e)
    for (int axis = 0; axis < spec.dim; ++axis) intern_coordinate(sd, e, axis);

  for (const auto& [name, hom] : spec.noises) {
    check_noise_name(name);
    if (sd.find(Space::Base, name) != kNoSymbol)
      fail(Errc::InvalidArgument, "duplicate noise name: " + name);
    if (hom <= -spec.theta)
      fail(Errc::InvalidArgument, "noise " + name + " is too rough for the kernel order");
    if (hom >= spec.cutoff) fail(Errc::InvalidArgument, "noise above the cutoff: " + name);
    SymbolData n;
    n.kind = SymbolKind::Noise;
    n.space = Space::Base;
    n.hom = hom;
    n.noise = int32_t(sd.noise_names.size());
    n.name = name;
    sd.noise_names.push_back(name);
    sd.intern(std::move(n));
  }

  for (int e = 0; e < sd.chart_count(); ++e)
    for (const MultiIndex& k : indices_up_to(spec.dim, spec.poly_degree))
      if (!k.is_zero()) intern_bpoly(sd, e, k);

  BuildCtx ctx{spec.max_deriv};

  for (const auto& rule : spec.products) {
    if (rule.empty()) fail(Errc::InvalidArgument, "empty product rule");
    std::vector<std::pair<SymbolId, int32_t>> factors;
    for (const std::string& termsrc : rule) {
      TermParser p(termsrc);
      factors.emplace_back(p.parse_term(sd, ctx, spec.cutoff), 1);
      p.skip_ws();
      if (p.pos != termsrc.size()) p.err("trailing input");
    }
    SymbolId prod = intern_product(sd, Space::Base, std::move(factors));
    if (sd.symbols[prod].hom >= spec.cutoff)
      fail(Errc::InvalidArgument, "product rule exceeds the truncation cutoff");
  }

  /* closure: integrate everything below the cutoff, then materialize rows
     (which interns legs); repeat until stable */
  bool changed = true;
  while (changed) {
    const size_t before = sd.symbols.size();
    for (SymbolId id = 0; id < SymbolId(sd.symbols.size()); ++id) {
      const SymbolData& s = sd.symbols[id];
      if (s.space != Space::Base || s.is_poly()) continue;
      if (s.hom + sd.theta >= spec.cutoff) continue;
      intern_integrated(sd, id);
    }
    for (SymbolId id = 0; id < SymbolId(sd.symbols.size()); ++id) ensure_row(sd, ctx, id);
    changed = sd.symbols.size() != before;
  }

  fill_basis_lists(sd);
  canonicalize_ids(sd);
  return ConcreteStructure(std::move(sd));
}

/* --- validation ------------------------------------------------------------ */

ValidationReport validate_assumptions(const ConcreteStructure& s) {
  ValidationReport rep;
  const StructureData& d = s.data();

  if (d.charts != make_charts(d.dim))
    rep.fail_item("charts", "(global)", "chart offsets are not the quarter lattice");
  if (s.find(Space::Base, "1") == kNoSymbol || s.find(Space::Plus, "1") == kNoSymbol) {
    rep.fail_item("units", "(global)", "missing unit symbol");
    return rep;
  }

  /* per-symbol bookkeeping */
  std::vector<bool> in_basis(d.symbols.size(), false);
  for (SymbolId id : d.base_basis) in_basis[id] = true;
  for (SymbolId id : d.plus_basis) in_basis[id] = true;

  for (SymbolId id = 0; id < SymbolId(d.symbols.size()); ++id) {
    const SymbolData& sym = d.symbols[id];
    auto bad = [&](const std::string& what) { rep.fail_item("symbol", sym.name, what); };
    switch (sym.kind) {
      case SymbolKind::Unit:
        if (sym.hom != 0) bad("unit with nonzero homogeneity");
        break;
      case SymbolKind::Noise:
        if (sym.noise < 0 || sym.noise >= int32_t(d.noise_names.size())) bad("bad noise index");
        break;
      case SymbolKind::BPoly:
        if (sym.space != Space::Base) bad("bounded monomial outside T");
        if (sym.chart < 0 || sym.chart >= d.chart_count()) bad("bad chart");
        if (sym.hom != sym.mindex.order()) bad("homogeneity is not the monomial order");
        if (sym.mindex.is_zero()) bad("zero exponent should be the unit");
        break;
      case SymbolKind::Coordinate:
        if (sym.space != Space::Plus || sym.hom != 1) bad("coordinate must sit in T+ at grade 1");
        if (sym.chart < 0 || sym.chart >= d.chart_count()) bad("bad chart");
        if (sym.axis < 0 || sym.axis >= d.dim) bad("bad axis");
        break;
      case SymbolKind::Integrated:
        if (sym.inner == kNoSymbol || d.symbols[sym.inner].space != Space::Base)
          bad("integration without a Base argument");
        else if (sym.hom != d.symbols[sym.inner].hom + d.theta)
          bad("integration does not raise the grade by the kernel order");
        else if (d.symbols[sym.inner].is_poly())
          bad("integration of a polynomial symbol should be null");
        break;
      case SymbolKind::IntegratedPlus:
        if (sym.space != Space::Plus) bad("decorated integration outside T+");
        if (sym.inner == kNoSymbol || d.symbols[sym.inner].space != Space::Base)
          bad("decorated integration without a Base argument");
        else if (sym.hom != d.symbols[sym.inner].hom + d.theta - sym.mindex.order())
          bad("decorated integration grade mismatch");
        else if (sym.hom <= 0)
          bad("decorated integration must have positive grade");
        if (sym.chart < 0 || sym.chart >= d.chart_count()) bad("bad chart");
        break;
      case SymbolKind::Product: {
        if (sym.factors.empty()) bad("product without factors");
        Rational h = 0;
        for (const auto& [fid, m] : sym.factors) {
          if (m < 1) bad("nonpositive multiplicity");
          const SymbolData& f = d.symbols[fid];
          if (f.space != sym.space) bad("factor from the wrong space");
          if (f.is_unit() || f.is_product()) bad("non-canonical factor");
          if (sym.space == Space::Plus && !f.is_plus_generator()) bad("non-generator factor in T+");
          h += f.hom * m;
        }
        if (h != sym.hom) bad("product grade is not the factor sum");
        break;
      }
    }
    /* symbols outside the basis lists: antipode-closure monomials only */
    if (!in_basis[id]) {
      if (sym.space != Space::Plus || !sym.is_product())
        rep.fail_item("basis", sym.name, "non-basis symbol that is not a closure monomial");
      if (!d.delta_plus[id].empty())
        rep.fail_item("basis", sym.name, "closure monomial carrying a coproduct row");
    }
  }

  /* recompute every row from the defining formulas, against the stored ones */
  StructureData scratch = d;
  scratch.rebuild_index();
  BuildCtx ctx;
  const size_t original = scratch.symbols.size();
  auto row_as_map = [](const std::vector<CoTerm>& row) {
    RowMap m;
    for (const auto& t : row) row_add(m, t.left, t.right, t.coeff);
    return m;
  };
  for (Space sp : {Space::Base, Space::Plus}) {
    for (SymbolId id : sp == Space::Base ? d.base_basis : d.plus_basis) {
      std::vector<CoTerm> fresh;
      try {
        fresh = compute_row(scratch, ctx, id);
      } catch (const Error& e) {
        rep.fail_item("row", d.symbols[id].name, std::string("recomputation failed: ") + e.what());
        continue;
      }
      if (scratch.symbols.size() != original) {
        rep.fail_item("row", d.symbols[id].name, "row references symbols absent from the structure");
        scratch = d;
        scratch.rebuild_index();
        continue;
      }
      const auto& stored = sp == Space::Base ? d.delta[id] : d.delta_plus[id];
      if (row_as_map(fresh) != row_as_map(stored))
        rep.fail_item("row", d.symbols[id].name, "stored row differs from the defining formula");
    }
  }

  /* quotients stay inside the subalgebra generated by coordinates and
     decorated integrations of strictly lower symbols */
  for (SymbolId tau : d.base_basis) {
    const Rational& h = d.symbols[tau].hom;
    for (const auto& t : d.delta[tau]) {
      if (t.left == tau) continue;
      const SymbolData& mu = d.symbols[t.right];
      auto factor_ok = [&](SymbolId fid) {
        const SymbolData& f = d.symbols[fid];
        if (f.kind == SymbolKind::Coordinate) return true;
        return f.kind == SymbolKind::IntegratedPlus && d.symbols[f.inner].hom < h;
      };
      bool ok = true;
      if (mu.is_plus_generator()) {
        ok = factor_ok(t.right);
      } else if (mu.is_product()) {
        for (const auto& [fid, m] : mu.factors) ok = ok && factor_ok(fid);
      }
      if (!ok)
        rep.fail_item("quotient-shape", d.symbols[tau].name,
                      "quotient monomial " + mu.name + " uses a non-admissible generator");
    }
  }

  return rep;
}

}  // namespace reconkit
