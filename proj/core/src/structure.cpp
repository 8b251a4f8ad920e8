#include "reconkit/structure.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace reconkit {

/* --- canonical naming ---------------------------------------------------- */

std::string chart_label(int e) { return "e" + std::to_string(e); }

std::string bpoly_name(int dim, int e, const MultiIndex& k) {
  std::string base = "X_" + chart_label(e);
  if (dim == 1) return k.k[0] == 1 ? base : base + "^" + std::to_string(int(k.k[0]));
  return base + "^" + k.str(dim);
}

std::string coordinate_name(int e, int axis) {
  return std::string(axis == 0 ? "x_" : "y_") + chart_label(e);
}

std::string integrated_name(const std::string& inner) { return "I(" + inner + ")"; }

std::string integrated_plus_name(int dim, const MultiIndex& k, int e, const std::string& inner) {
  return "I" + k.str(dim) + "+_" + chart_label(e) + "(" + inner + ")";
}

std::string product_name(const std::vector<std::pair<std::string, int32_t>>& named_factors) {
  std::string out;
  for (const auto& [nm, m] : named_factors) {
    if (!out.empty()) out += "*";
    out += nm;
    if (m > 1) out += "^" + std::to_string(m);
  }
  return out;
}

/* --- canonical ordering -------------------------------------------------- */

static int kind_rank(SymbolKind k) {
  switch (k) {
    case SymbolKind::Unit: return 0;
    case SymbolKind::Noise: return 1;
    case SymbolKind::BPoly: return 2;
    case SymbolKind::Coordinate: return 2;
    case SymbolKind::Integrated: return 3;
    case SymbolKind::IntegratedPlus: return 3;
    case SymbolKind::Product: return 9;
  }
  return 99;
}

static bool canonical_less(const SymbolData& a, const SymbolData& b) {
  if (a.space != b.space) return a.space == Space::Base;
  if (a.hom != b.hom) return a.hom < b.hom;
  int ra = kind_rank(a.kind), rb = kind_rank(b.kind);
  if (ra != rb) return ra < rb;
  return a.name < b.name;
}

void canonicalize_ids(StructureData& sd) {
  const int n = int(sd.symbols.size());
  std::vector<SymbolId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](SymbolId x, SymbolId y) {
    return canonical_less(sd.symbols[x], sd.symbols[y]);
  });
  std::vector<SymbolId> remap(n);
  for (int pos = 0; pos < n; ++pos) remap[order[pos]] = pos;

  std::vector<SymbolData> symbols(n);
  std::vector<std::vector<CoTerm>> delta(n), delta_plus(n);
  for (int old = 0; old < n; ++old) {
    SymbolData s = std::move(sd.symbols[old]);
    if (s.inner != kNoSymbol) s.inner = remap[s.inner];
    for (auto& [fid, m] : s.factors) fid = remap[fid];
    symbols[remap[old]] = std::move(s);
    auto fix_row = [&](std::vector<CoTerm> row) {
      for (auto& t : row) {
        t.left = remap[t.left];
        t.right = remap[t.right];
      }
      std::sort(row.begin(), row.end(), [](const CoTerm& a, const CoTerm& b) {
        return a.left != b.left ? a.left < b.left : a.right < b.right;
      });
      return row;
    };
    delta[remap[old]] = fix_row(std::move(sd.delta[old]));
    delta_plus[remap[old]] = fix_row(std::move(sd.delta_plus[old]));
  }
  sd.symbols = std::move(symbols);
  sd.delta = std::move(delta);
  sd.delta_plus = std::move(delta_plus);

  auto fix_list = [&](std::vector<SymbolId>& v) {
    for (auto& id : v) id = remap[id];
    std::sort(v.begin(), v.end());
  };
  fix_list(sd.base_basis);
  fix_list(sd.plus_basis);
  fix_list(sd.plus_generators);
  sd.rebuild_index();
}

/* --- products ------------------------------------------------------------ */

SymbolId intern_product(StructureData& sd, Space space,
                        std::vector<std::pair<SymbolId, int32_t>> factors, bool rows) {
  /* Flatten nested products, drop units, accumulate multiplicities. */
  std::map<SymbolId, int64_t> mult;
  std::vector<std::pair<SymbolId, int32_t>> work = std::move(factors);
  while (!work.empty()) {
    auto [id, m] = work.back();
    work.pop_back();
    if (m == 0) continue;
    const SymbolData& s = sd.symbols[id];
    if (s.space != space) fail(Errc::InvalidArgument, "product factors from mixed spaces");
    if (s.is_unit()) continue;
    if (s.is_product()) {
      for (const auto& [fid, fm] : s.factors) work.emplace_back(fid, int32_t(fm * m));
      continue;
    }
    mult[id] += m;
  }

  /* Merge Base bounded monomials chart-by-chart into a single exponent. */
  if (space == Space::Base) {
    std::map<int, MultiIndex> poly;  // chart -> combined exponent
    for (auto it = mult.begin(); it != mult.end();) {
      const SymbolData& s = sd.symbols[it->first];
      if (s.kind == SymbolKind::BPoly) {
        MultiIndex& acc = poly[s.chart];
        for (int rep = 0; rep < it->second; ++rep) acc = acc.plus(s.mindex);
        it = mult.erase(it);
      } else {
        ++it;
      }
    }
    for (const auto& [e, k] : poly) {
      std::string nm = bpoly_name(sd.dim, e, k);
      SymbolId id = sd.find(Space::Base, nm);
      if (id == kNoSymbol) {
        SymbolData b;
        b.kind = SymbolKind::BPoly;
        b.space = Space::Base;
        b.hom = k.order();
        b.chart = e;
        b.mindex = k;
        b.name = nm;
        id = sd.intern(std::move(b));
      }
      mult[id] += 1;
    }
  }

  if (mult.empty()) {
    SymbolId u = sd.find(space, "1");
    if (u == kNoSymbol) fail(Errc::InvalidArgument, "structure lacks a unit symbol");
    return u;
  }
  if (mult.size() == 1 && mult.begin()->second == 1) return mult.begin()->first;

  std::vector<std::pair<SymbolId, int32_t>> canon;
  std::vector<std::pair<std::string, int32_t>> named;
  for (const auto& [id, m] : mult) canon.emplace_back(id, int32_t(m));
  std::sort(canon.begin(), canon.end(), [&](const auto& a, const auto& b) {
    const SymbolData& sa = sd.symbols[a.first];
    const SymbolData& sb = sd.symbols[b.first];
    int ra = kind_rank(sa.kind), rb = kind_rank(sb.kind);
    if (ra != rb) return ra < rb;
    return sa.name < sb.name;
  });
  for (const auto& [id, m] : canon) named.emplace_back(sd.symbols[id].name, m);
  std::string nm = product_name(named);

  SymbolId existing = sd.find(space, nm);
  if (existing != kNoSymbol) return existing;

  SymbolData p;
  p.kind = SymbolKind::Product;
  p.space = space;
  p.hom = 0;
  for (const auto& [id, m] : canon) p.hom += sd.symbols[id].hom * m;
  p.factors = std::move(canon);
  p.name = nm;
  (void)rows;  // membership in plus_basis is managed by the caller
  return sd.intern(std::move(p));
}

Vec vec_mul(StructureData& sd, const Vec& a, const Vec& b, bool rows) {
  if (a.space != b.space) fail(Errc::InvalidArgument, "vector product across spaces");
  Vec out(a.space);
  for (const auto& [ia, ca] : a.terms)
    for (const auto& [ib, cb] : b.terms)
      out.add(intern_product(sd, a.space, {{ia, 1}, {ib, 1}}, rows), ca * cb);
  return out;
}

/* --- reports ------------------------------------------------------------- */

static std::string render_items(bool ok, const std::vector<CheckItem>& failures,
                                const std::vector<std::pair<std::string, int64_t>>* counts) {
  std::ostringstream os;
  if (counts) {
    for (const auto& [name, n] : *counts) os << name << ": " << n << " instances\n";
  }
  if (ok) {
    os << "all checks passed\n";
  } else {
    os << failures.size() << " failure(s)\n";
    for (const auto& f : failures)
      os << "  [" << f.check << "] at " << f.witness << ": " << f.detail << "\n";
  }
  return os.str();
}

std::string AxiomReport::summary() const { return render_items(ok, failures, &counts); }
std::string ValidationReport::summary() const { return render_items(ok, failures, nullptr); }

/* --- freezing ------------------------------------------------------------ */

static uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

static std::string canonical_digest_text(const StructureData& sd) {
  std::ostringstream os;
  os << "dim " << sd.dim << "\ntheta " << to_string(sd.theta) << "\n";
  for (const auto& ch : sd.charts) {
    os << "chart";
    for (const auto& c : ch) os << " " << to_string(c);
    os << "\n";
  }
  for (const auto& n : sd.noise_names) os << "noise " << n << "\n";
  auto dump_row = [&](const std::vector<CoTerm>& row) {
    for (const auto& t : row) os << " (" << t.left << "," << t.right << "," << to_string(t.coeff) << ")";
  };
  for (SymbolId id : sd.base_basis) {
    os << "B " << sd.symbols[id].name << " " << to_string(sd.symbols[id].hom) << " |";
    dump_row(sd.delta[id]);
    os << "\n";
  }
  for (SymbolId id : sd.plus_basis) {
    os << "P " << sd.symbols[id].name << " " << to_string(sd.symbols[id].hom) << " |";
    dump_row(sd.delta_plus[id]);
    os << "\n";
  }
  return os.str();
}

ConcreteStructure::ConcreteStructure(StructureData data, bool compute_antipodes) {
  data.rebuild_index();
  base_unit_ = data.find(Space::Base, "1");
  plus_unit_ = data.find(Space::Plus, "1");
  if (base_unit_ == kNoSymbol || plus_unit_ == kNoSymbol)
    fail(Errc::InvalidArgument, "structure lacks unit symbols");

  hash_ = fnv1a(canonical_digest_text(data));

  for (SymbolId id : data.base_basis) {
    const Rational& h = data.symbols[id].hom;
    if (base_levels_.empty() || base_levels_.back() != h) {
      if (std::find(base_levels_.begin(), base_levels_.end(), h) == base_levels_.end())
        base_levels_.push_back(h);
    }
  }
  std::sort(base_levels_.begin(), base_levels_.end());

  if (compute_antipodes) {
    /* Plus basis ascending by homogeneity: every left leg of a row and every
       factor of a product is settled before it is needed. */
    std::vector<SymbolId> order = data.plus_basis;
    std::sort(order.begin(), order.end(), [&](SymbolId a, SymbolId b) {
      return canonical_less(data.symbols[a], data.symbols[b]);
    });
    std::vector<Vec> table;  // grown alongside interning
    auto vec_at = [&](SymbolId id) -> Vec& {
      if (SymbolId(table.size()) <= id) table.resize(id + 1, Vec(Space::Plus));
      return table[id];
    };
    for (SymbolId tau : order) {
      const SymbolData& s = data.symbols[tau];
      if (s.is_unit()) {
        vec_at(tau) = vec_of(Space::Plus, tau);
        continue;
      }
      if (s.is_product()) {
        Vec acc = vec_of(Space::Plus, plus_unit_);
        for (const auto& [fid, m] : s.factors)
          for (int rep = 0; rep < m; ++rep) acc = vec_mul(data, acc, vec_at(fid), false);
        vec_at(tau) = std::move(acc);
        continue;
      }
      /* Generator: convolution of the antipode against the identity vanishes,
         so the value is minus the symbol minus the strictly-lower middle part. */
      const auto& row = data.delta_plus[tau];
      if (row.empty()) fail(Errc::InvalidArgument, "antipode needs a coproduct row: " + s.name);
      Vec acc = vec_of(Space::Plus, tau, -1);
      for (const auto& t : row) {
        if (t.left == plus_unit_ || (t.left == tau && t.right == plus_unit_)) continue;
        const Vec al = vec_at(t.left);
        if (al.is_zero())
          fail(Errc::InvalidArgument, "unsettled antipode leg in row of " + s.name);
        Vec contrib = vec_mul(data, al, vec_of(Space::Plus, t.right), false);
        acc.add_scaled(contrib, -t.coeff);
      }
      vec_at(tau) = std::move(acc);
    }
    table.resize(data.symbols.size(), Vec(Space::Plus));
    antipode_ = std::move(table);
  }

  d_ = std::make_shared<const StructureData>(std::move(data));
}

const std::vector<CoTerm>& ConcreteStructure::delta_row(SymbolId id) const {
  if (id < 0 || id >= symbol_count() || d_->symbols[id].space != Space::Base)
    fail(Errc::NotInBasis, "comodule coproduct row requires a Base symbol");
  return d_->delta[id];
}

const std::vector<CoTerm>& ConcreteStructure::delta_plus_row(SymbolId id) const {
  if (id < 0 || id >= symbol_count() || d_->symbols[id].space != Space::Plus)
    fail(Errc::NotInBasis, "algebra coproduct row requires a Plus symbol");
  return d_->delta_plus[id];
}

const Vec& ConcreteStructure::antipode(SymbolId id) const {
  if (antipode_.empty()) fail(Errc::InvalidArgument, "antipode table was not computed");
  if (id < 0 || id >= SymbolId(antipode_.size()) || d_->symbols[id].space != Space::Plus)
    fail(Errc::NotInBasis, "antipode requires a Plus basis symbol");
  return antipode_[id];
}

}  // namespace reconkit
