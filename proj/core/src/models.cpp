#include "reconkit/models.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "json.hpp"
#include "reconkit/fft.hpp"
#include "reconkit/io.hpp"
#include "reconkit/rng.hpp"

namespace reconkit {

namespace {

void axpy(std::vector<double>& acc, double c, const Field& f) {
  if (c == 0.0) return;
  const std::vector<double>& v = f.values();
  for (size_t p = 0; p < acc.size(); ++p) acc[p] += c * v[p];
}

Field pow_field(const Field& f, int32_t m) {
  Field out = f;
  for (int32_t i = 1; i < m; ++i) out = out * f;
  return out;
}

bool all_finite(const Field& f) {
  for (double v : f.values())
    if (!std::isfinite(v)) return false;
  return true;
}

double hom_of(const ConcreteStructure& s, SymbolId id) { return to_double(s.symbol(id).hom); }

/* Distinct strict left legs of the coproduct row of tau, with their quotient
   vectors, in ascending id order. */
std::vector<std::pair<SymbolId, Vec>> strict_subs(const ConcreteStructure& s, SymbolId tau) {
  std::map<SymbolId, Vec> q;
  for (const auto& t : s.row(tau)) {
    if (t.left == tau) continue;
    auto [it, fresh] = q.try_emplace(t.left, Vec(Space::Plus));
    it->second.add(t.right, t.coeff);
  }
  std::vector<std::pair<SymbolId, Vec>> out;
  out.reserve(q.size());
  for (auto& [id, v] : q) out.emplace_back(id, std::move(v));
  return out;
}

/* Stratified sample of grid nodes over the flat index: one uniform draw per
   equal-length stratum, deterministic in the rng stream. */
std::vector<size_t> stratified_nodes(const Grid& g, int count, DetRng& rng) {
  const size_t n = g.size();
  if (count < 1) count = 1;
  if (size_t(count) > n) count = int(n);
  std::vector<size_t> out;
  out.reserve(size_t(count));
  const size_t w = n / size_t(count);
  for (int i = 0; i < count; ++i)
    out.push_back(size_t(i) * w + size_t(rng.next_u64() % w));
  return out;
}

/* Least squares slope of -log2(values) against the level index; levels with
   value below the dead cut are skipped. */
struct SlopeFit {
  double slope = 0.0;
  int points = 0;
};
SlopeFit decay_slope(const std::vector<std::pair<int, double>>& level_values) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [j, v] : level_values) {
    if (v < 1e-13) continue;
    const double x = double(j), y = -std::log2(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return {0.0, n};
  const double denom = double(n) * sxx - sx * sx;
  if (denom == 0.0) return {0.0, n};
  return {(double(n) * sxy - sx * sy) / denom, n};
}

void add_failure(std::vector<CheckItem>& out, const std::string& check,
                 const std::string& witness, double residual) {
  std::ostringstream os;
  os << "residual " << residual;
  out.push_back({check, witness, os.str()});
}

std::string pair_witness(const std::string& name, size_t p, size_t q) {
  return name + " @ (" + std::to_string(p) + ", " + std::to_string(q) + ")";
}

double torus_dist(const Grid& g, size_t p, size_t q) {
  const double d0 = torus_diff(g.x0(p), g.x0(q));
  if (g.dim == 1) return std::fabs(d0);
  const double d1 = torus_diff(g.x1(p), g.x1(q));
  return std::sqrt(d0 * d0 + d1 * d1);
}

Field reflect(const Field& f) {
  const Grid& g = f.grid();
  const int n = g.n();
  std::vector<double> out(g.size());
  if (g.dim == 1) {
    for (int i = 0; i < n; ++i) out[g.at(-i)] = f[size_t(i)];
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[g.at(-i, -j)] = f.at(i, j);
  }
  return Field(g, std::move(out));
}

}  // namespace

/* --- CharacterField -------------------------------------------------------- */

CharacterField::CharacterField(ConcreteStructure s, Grid grid)
    : s_(std::move(s)), grid_(grid), gen_(size_t(s_.symbol_count())) {}

void CharacterField::set_generator(SymbolId id, Field values) {
  if (finalized_) fail(Errc::InvalidArgument, "character field is frozen");
  if (id < 0 || id >= SymbolId(gen_.size()) || !s_.symbol(id).is_plus_generator())
    fail(Errc::InvalidArgument, "symbol is not a character generator");
  if (!(values.grid() == grid_)) fail(Errc::InvalidArgument, "generator field grid mismatch");
  gen_[size_t(id)] = std::move(values);
}

bool CharacterField::generator_set(SymbolId id) const {
  return id >= 0 && id < SymbolId(gen_.size()) && gen_[size_t(id)].has_value();
}

void CharacterField::finalize() {
  if (finalized_) fail(Errc::InvalidArgument, "character field already finalized");
  if (!s_.has_antipodes())
    fail(Errc::UndefinedCharacter, "structure carries no antipode table");
  for (SymbolId id : s_.plus_generators())
    if (!gen_[size_t(id)])
      fail(Errc::UndefinedCharacter, "missing generator value: " + s_.symbol(id).name);

  const int count = s_.symbol_count();
  val_.assign(size_t(count), Field{});
  inv_.assign(size_t(count), Field{});

  std::function<const Field&(SymbolId)> direct = [&](SymbolId id) -> const Field& {
    Field& slot = val_[size_t(id)];
    if (!slot.empty()) return slot;
    const SymbolData& sd = s_.symbol(id);
    if (sd.is_unit()) {
      slot = Field::constant(grid_, 1.0);
    } else if (sd.is_plus_generator()) {
      slot = *gen_[size_t(id)];
    } else if (sd.is_product()) {
      Field acc = Field::constant(grid_, 1.0);
      for (const auto& [fid, mult] : sd.factors) acc = acc * pow_field(direct(fid), mult);
      slot = std::move(acc);
    } else {
      fail(Errc::InvalidArgument, "unexpected symbol kind on the character side");
    }
    return slot;
  };
  std::function<const Field&(SymbolId)> inverse = [&](SymbolId id) -> const Field& {
    Field& slot = inv_[size_t(id)];
    if (!slot.empty()) return slot;
    const SymbolData& sd = s_.symbol(id);
    if (sd.is_unit()) {
      slot = Field::constant(grid_, 1.0);
    } else if (sd.is_plus_generator()) {
      /* the antipode of a generator may reach product symbols; their direct
         values exist by the recursion above */
      const Vec& a = s_.antipode(id);
      std::vector<double> acc(grid_.size(), 0.0);
      for (const auto& [tid, c] : a.terms) axpy(acc, to_double(c), direct(tid));
      slot = Field(grid_, std::move(acc));
    } else if (sd.is_product()) {
      Field acc = Field::constant(grid_, 1.0);
      for (const auto& [fid, mult] : sd.factors) acc = acc * pow_field(inverse(fid), mult);
      slot = std::move(acc);
    } else {
      fail(Errc::InvalidArgument, "unexpected symbol kind on the character side");
    }
    return slot;
  };

  for (SymbolId id = 0; id < count; ++id) {
    if (s_.symbol(id).space != Space::Plus) continue;
    if (!all_finite(direct(id)) || !all_finite(inverse(id)))
      fail(Errc::UndefinedCharacter, "character values not finite on " + s_.symbol(id).name);
  }
  finalized_ = true;
}

const Field& CharacterField::value(SymbolId id, const std::vector<Field>& table,
                                   const char* what) const {
  if (!finalized_) fail(Errc::UndefinedCharacter, "character field not finalized");
  if (id < 0 || id >= SymbolId(table.size()) || s_.symbol(id).space != Space::Plus)
    fail(Errc::InvalidArgument, std::string(what) + " expects a character-side symbol");
  return table[size_t(id)];
}

const Field& CharacterField::eval(SymbolId tau) const { return value(tau, val_, "eval"); }

Field CharacterField::eval(const Vec& v) const {
  if (v.space != Space::Plus) fail(Errc::InvalidArgument, "eval expects a character-side vector");
  std::vector<double> acc(grid_.size(), 0.0);
  for (const auto& [id, c] : v.terms) axpy(acc, to_double(c), eval(id));
  return Field(grid_, std::move(acc));
}

const Field& CharacterField::inv_eval(SymbolId tau) const { return value(tau, inv_, "inv_eval"); }

Field CharacterField::inv_eval(const Vec& v) const {
  if (v.space != Space::Plus)
    fail(Errc::InvalidArgument, "inv_eval expects a character-side vector");
  std::vector<double> acc(grid_.size(), 0.0);
  for (const auto& [id, c] : v.terms) axpy(acc, to_double(c), inv_eval(id));
  return Field(grid_, std::move(acc));
}

double CharacterField::g_yx_at(SymbolId tau, size_t py, size_t px) const {
  double out = 0.0;
  for (const auto& t : s_.delta_plus_row(tau))
    out += to_double(t.coeff) * eval(t.left)[py] * inv_eval(t.right)[px];
  return out;
}

double CharacterField::g_yx_at(const Vec& v, size_t py, size_t px) const {
  if (v.space != Space::Plus)
    fail(Errc::InvalidArgument, "g_yx_at expects a character-side vector");
  double out = 0.0;
  for (const auto& [id, c] : v.terms) out += to_double(c) * g_yx_at(id, py, px);
  return out;
}

TwoVarFunction CharacterField::g_two_point(SymbolId tau) const {
  TwoVarFunction lam;
  for (const auto& t : s_.delta_plus_row(tau))
    lam.rank.emplace_back(to_double(t.coeff) * inv_eval(t.right), eval(t.left));
  return lam;
}

/* --- Model ------------------------------------------------------------------ */

Model::Model(CharacterField g, std::map<SymbolId, Field> pi, std::string provenance, Space space)
    : g_(std::move(g)), pi_(std::move(pi)), provenance_(std::move(provenance)), space_(space) {
  if (!g_.finalized()) fail(Errc::InvalidArgument, "model needs a finalized character field");
  const ConcreteStructure& s = g_.structure();
  for (SymbolId id : s.basis(space_)) {
    auto it = pi_.find(id);
    if (it == pi_.end())
      fail(Errc::InvalidArgument, "missing realization field: " + s.symbol(id).name);
    if (!(it->second.grid() == g_.grid()))
      fail(Errc::InvalidArgument, "realization grid mismatch on " + s.symbol(id).name);
    if (!all_finite(it->second))
      fail(Errc::InvalidArgument, "realization not finite on " + s.symbol(id).name);
  }
  if (pi_.size() != s.basis(space_).size())
    fail(Errc::InvalidArgument, "realization table carries symbols outside the carrier basis");
}

const Field& Model::pi(SymbolId tau) const {
  auto it = pi_.find(tau);
  if (it == pi_.end())
    fail(Errc::NotInBasis, "no realization for symbol: " + structure().symbol(tau).name);
  return it->second;
}

Field Model::pi(const Vec& v) const {
  if (v.space != space_) fail(Errc::InvalidArgument, "vector lives in the wrong space");
  std::vector<double> acc(grid().size(), 0.0);
  for (const auto& [id, c] : v.terms) axpy(acc, to_double(c), pi(id));
  return Field(grid(), std::move(acc));
}

const std::vector<SymbolId>& Model::carrier() const { return structure().basis(space_); }

/* --- recentred realizations ------------------------------------------------- */

Field pi_x_field(const Model& m, SymbolId tau, size_t px) {
  const ConcreteStructure& s = m.structure();
  std::vector<double> acc(m.grid().size(), 0.0);
  for (const auto& t : s.row(tau))
    axpy(acc, to_double(t.coeff) * m.g().inv_eval(t.right)[px], m.pi(t.left));
  return Field(m.grid(), std::move(acc));
}

Field pi_x_field(const Model& m, const Vec& v, size_t px) {
  if (v.space != m.space()) fail(Errc::InvalidArgument, "vector lives in the wrong space");
  std::vector<double> acc(m.grid().size(), 0.0);
  for (const auto& [id, c] : v.terms) {
    Field f = pi_x_field(m, id, px);
    axpy(acc, to_double(c), f);
  }
  return Field(m.grid(), std::move(acc));
}

TwoVarFunction pi_x_kernel(const Model& m, SymbolId tau) {
  TwoVarFunction lam;
  for (const auto& t : m.structure().row(tau))
    lam.rank.emplace_back(to_double(t.coeff) * m.g().inv_eval(t.right), m.pi(t.left));
  return lam;
}

TwoVarFunction pi_x_expansion(const Model& m, SymbolId tau) {
  const ConcreteStructure& s = m.structure();
  const size_t n = m.grid().size();
  std::map<SymbolId, std::vector<double>> acc;

  std::function<void(SymbolId, const std::vector<double>&, int)> walk =
      [&](SymbolId sig, const std::vector<double>& coef, int sign) {
        for (const auto& [l, q] : strict_subs(s, sig)) {
          Field qv = m.g().eval(q);
          std::vector<double> next(n);
          for (size_t p = 0; p < n; ++p) next[p] = coef[p] * qv[p];
          auto [it, fresh] = acc.try_emplace(l, std::vector<double>(n, 0.0));
          for (size_t p = 0; p < n; ++p) it->second[p] += double(-sign) * next[p];
          walk(l, next, -sign);
        }
      };

  std::vector<double> ones(n, 1.0);
  acc.emplace(tau, ones);
  walk(tau, ones, 1);

  TwoVarFunction lam;
  for (auto& [id, coef] : acc)
    lam.rank.emplace_back(Field(m.grid(), std::move(coef)), m.pi(id));
  return lam;
}

TwoVarFunction g_yx_expansion(const CharacterField& g, SymbolId tau, SymbolId sigma) {
  const ConcreteStructure& s = g.structure();
  const Grid& grid = g.grid();
  const size_t n = grid.size();
  TwoVarFunction lam;
  if (tau == sigma) {
    lam.rank.emplace_back(Field::constant(grid, 1.0), Field::constant(grid, 1.0));
    return lam;
  }
  if (quotient(s, tau, sigma).is_zero())
    fail(Errc::InvalidArgument, "expansion target is not a sub-symbol");

  /* end_acc[nu]: the signed chain-coefficient field (an x function) standing
     in front of (g_y - g_x)(nu / sigma). */
  std::map<SymbolId, std::vector<double>> end_acc;
  std::function<void(SymbolId, const std::vector<double>&, int)> walk =
      [&](SymbolId node, const std::vector<double>& coef, int sign) {
        {
          auto [it, fresh] = end_acc.try_emplace(node, std::vector<double>(n, 0.0));
          for (size_t p = 0; p < n; ++p) it->second[p] += double(sign) * coef[p];
        }
        for (const auto& [l, q] : strict_subs(s, node)) {
          if (l == sigma || quotient(s, l, sigma).is_zero()) continue;
          Field qv = g.eval(q);
          std::vector<double> next(n);
          for (size_t p = 0; p < n; ++p) next[p] = coef[p] * qv[p];
          walk(l, next, -sign);
        }
      };
  walk(tau, std::vector<double>(n, 1.0), 1);

  std::vector<double> pure_x(n, 0.0);
  for (auto& [nu, coef] : end_acc) {
    Field end_val = g.eval(quotient(s, nu, sigma));
    std::vector<double> cvec = coef;
    for (size_t p = 0; p < n; ++p) pure_x[p] -= cvec[p] * end_val[p];
    lam.rank.emplace_back(Field(grid, std::move(cvec)), std::move(end_val));
  }
  lam.rank.emplace_back(Field(grid, std::move(pure_x)), Field::constant(grid, 1.0));
  return lam;
}

/* --- mollifiers -------------------------------------------------------------- */

namespace {

double bump_raw(double t) {  // support |t| < 1
  const double s = 1.0 - t * t;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

/* Hoelder-r norm of the scale-one profile member on a fine reference grid.
   The profile has support radius 1 and is squeezed onto the reference torus
   through u = 4 x, so u-derivatives pick up one factor 4 per order. */
double profile_cr_norm(int dim, double r, int member) {
  if (r <= 0.0 || r > 2.0)
    fail(Errc::InvalidArgument, "mollifier smoothness order must lie in (0, 2]");
  const Grid fine(dim, dim == 1 ? 13 : 9);
  Field raw = dim == 1 ? sample(fine, [](double x) { return bump_raw(4.0 * torus_diff(x, 0.0)); })
                       : sample2(fine, [](double x, double y) {
                           const double u = 4.0 * torus_diff(x, 0.0);
                           const double v = 4.0 * torus_diff(y, 0.0);
                           return bump_raw(std::sqrt(u * u + v * v));
                         });
  const double mass = mean(raw) * std::pow(4.0, dim);  // integral in u variables
  Field f = (1.0 / mass) * raw;
  if (member > 0) f = 0.25 * derivative(f, member == 1 ? 1 : 0, member == 2 ? 1 : 0);

  const int top = int(std::floor(r));
  const bool fractional = r - double(top) > 1e-12;
  double norm = 0.0;
  std::vector<Field> top_derivs;
  for (const MultiIndex& k : indices_up_to(dim, top)) {
    Field d = k.is_zero() ? f
                          : (1.0 / std::pow(4.0, k.order())) *
                                derivative(f, int(k.k[0]), int(k.k[1]));
    norm = std::max(norm, linf(d));
    if (fractional && k.order() == top) top_derivs.push_back(d);
  }
  if (fractional) {
    const double frac = r - double(top);
    const size_t p_step = dim == 1 ? 3 : 131;
    const size_t q_step = dim == 1 ? 7 : 101;
    const size_t n = fine.size();
    for (const Field& d : top_derivs)
      for (size_t p = 0; p < n; p += p_step)
        for (size_t q = p + q_step; q < n; q += q_step) {
          const double dist = 4.0 * torus_dist(fine, p, q);
          if (dist <= 0.0) continue;
          norm = std::max(norm, std::fabs(d[p] - d[q]) / std::pow(dist, frac));
        }
  }
  return norm;
}

}  // namespace

MollifierFamily build_mollifiers(const Grid& g, double r) {
  if (r <= 0.0 || r > 2.0)
    fail(Errc::InvalidArgument, "mollifier smoothness order must lie in (0, 2]");
  MollifierFamily mf;
  mf.grid = g;
  mf.r = r;
  const int top = lp_top(g) - 2;
  if (top < 1) fail(Errc::InvalidArgument, "grid too small for a mollifier family");
  for (int j = 1; j <= top; ++j) mf.levels.push_back(j);

  mf.kernels.resize(size_t(1 + g.dim));
  std::vector<Field>& base = mf.kernels[0];
  for (int j : mf.levels) {
    const double lambda = std::pow(2.0, -j);
    Field raw = g.dim == 1
                    ? sample(g, [&](double x) { return bump_raw(torus_diff(x, 0.0) / lambda); })
                    : sample2(g, [&](double x, double y) {
                        const double u = torus_diff(x, 0.0) / lambda;
                        const double v = torus_diff(y, 0.0) / lambda;
                        return bump_raw(std::sqrt(u * u + v * v));
                      });
    const double discrete_mass = mean(raw);  // h^d sum = mean on the unit torus
    base.push_back((1.0 / discrete_mass) * raw);
  }
  for (int axis = 0; axis < g.dim; ++axis) {
    std::vector<Field>& member = mf.kernels[size_t(1 + axis)];
    for (size_t li = 0; li < mf.levels.size(); ++li) {
      const double lambda = std::pow(2.0, -mf.levels[li]);
      member.push_back(lambda * derivative(base[li], axis == 0 ? 1 : 0, axis == 1 ? 1 : 0));
    }
  }
  for (int mbr = 0; mbr <= g.dim; ++mbr) mf.cr_norm.push_back(profile_cr_norm(g.dim, r, mbr));
  return mf;
}

double mollifier_pairing(const MollifierFamily& mf, int member, int level_index, const Field& f,
                         size_t px) {
  const Grid& g = mf.grid;
  if (!(f.grid() == g)) fail(Errc::InvalidArgument, "pairing grid mismatch");
  if (member < 0 || member >= mf.members() || level_index < 0 ||
      level_index >= int(mf.levels.size()))
    fail(Errc::InvalidArgument, "mollifier member or level out of range");
  const Field& k = mf.kernels[size_t(member)][size_t(level_index)];
  /* full circular sum: the derivative members are spectral derivatives of the
     sampled bump, so they carry small global tails that a support-sized
     window would truncate */
  const int n = g.n();
  double sum = 0.0;
  if (g.dim == 1) {
    const int i0 = int(px);
    for (int o = 0; o < n; ++o) sum += f.at(i0 + o) * k.at(o);
  } else {
    const int i0 = int(px) / n, j0 = int(px) % n;
    for (int oi = 0; oi < n; ++oi)
      for (int oj = 0; oj < n; ++oj) sum += f.at(i0 + oi, j0 + oj) * k.at(oi, oj);
  }
  const double hd = std::pow(g.h(), g.dim);
  return sum * hd / mf.cr_norm[size_t(member)];
}

Field mollifier_pairing_field(const MollifierFamily& mf, int member, int level_index,
                              const Field& f) {
  if (member < 0 || member >= mf.members() || level_index < 0 ||
      level_index >= int(mf.levels.size()))
    fail(Errc::InvalidArgument, "mollifier member or level out of range");
  const Field& k = mf.kernels[size_t(member)][size_t(level_index)];
  return (1.0 / mf.cr_norm[size_t(member)]) * convolve(f, reflect(k));
}

/* --- transition checks -------------------------------------------------------- */

std::string TransitionReport::summary() const {
  std::ostringstream os;
  os << (ok ? "pass" : "FAIL") << ": transition " << worst_transition << ", recovery "
     << worst_recovery << ", cocycle " << worst_cocycle << ", polynomial sector " << worst_poly;
  for (const auto& f : failures)
    os << "\n  " << f.check << " at " << f.witness << ": " << f.detail;
  return os.str();
}

TransitionReport check_transition(const Model& m, const TransitionOptions& opt) {
  const ConcreteStructure& s = m.structure();
  const CharacterField& g = m.g();
  const Grid& grid = m.grid();
  const size_t n = grid.size();
  const std::vector<SymbolId>& carrier = m.carrier();
  TransitionReport rep;
  DetRng rng(opt.seed);

  auto name = [&](SymbolId id) { return s.symbol(id).name; };
  auto fields_at = [&](size_t node) {
    std::map<SymbolId, Field> out;
    for (SymbolId id : carrier) out.emplace(id, pi_x_field(m, id, node));
    return out;
  };
  /* coefficients of the recentring operator ghat_xy on tau: the two-point
     character g_xy applied to the right legs, collected per left leg */
  auto recentring_coeffs = [&](SymbolId tau, size_t px, size_t py) {
    std::map<SymbolId, double> coef;
    for (const auto& t : s.row(tau))
      coef[t.left] += to_double(t.coeff) * g.g_yx_at(t.right, px, py);
    return coef;
  };

  for (int k = 0; k < opt.pairs; ++k) {
    const size_t px = size_t(rng.next_u64() % n);
    const size_t py = size_t(rng.next_u64() % n);
    auto at_x = fields_at(px);
    auto at_y = fields_at(py);
    for (SymbolId tau : carrier) {
      /* transition: recentring at y equals ghat_xy followed by recentring at x */
      Field rhs = Field::zeros(grid);
      for (const auto& [l, c] : recentring_coeffs(tau, px, py)) rhs = rhs + c * at_x.at(l);
      const Field& lhs = at_y.at(tau);
      const double scale = std::max(1.0, linf(lhs));
      const double res = linf_diff(lhs, rhs) / scale;
      rep.worst_transition = std::max(rep.worst_transition, res);
      if (res > opt.tol)
        add_failure(rep.failures, "transition", pair_witness(name(tau), px, py), res);

      /* recovery of the realization from the recentred one */
      Field rec = Field::zeros(grid);
      for (const auto& t : s.row(tau))
        rec = rec + to_double(t.coeff) * g.eval(t.right)[px] * at_x.at(t.left);
      const Field& target = m.pi(tau);
      const double rscale = std::max(1.0, linf(target));
      const double rres = linf_diff(target, rec) / rscale;
      rep.worst_recovery = std::max(rep.worst_recovery, rres);
      if (rres > opt.recovery_tol)
        add_failure(rep.failures, "recovery", pair_witness(name(tau), px, py), rres);
    }
  }

  /* cocycle of recentring operators over sampled triples, symbolically */
  for (int k = 0; k < opt.pairs; ++k) {
    const size_t px = size_t(rng.next_u64() % n);
    const size_t py = size_t(rng.next_u64() % n);
    const size_t pz = size_t(rng.next_u64() % n);
    for (SymbolId tau : carrier) {
      auto yz = recentring_coeffs(tau, py, pz);
      std::map<SymbolId, double> two;
      for (const auto& [l, c] : yz)
        for (const auto& [l2, c2] : recentring_coeffs(l, px, py)) two[l2] += c * c2;
      std::map<SymbolId, double> direct = recentring_coeffs(tau, px, pz);
      for (const auto& [l2, c2] : two) direct.try_emplace(l2, 0.0);
      for (const auto& [l2, c2] : direct) {
        auto it = two.find(l2);
        const double got = it == two.end() ? 0.0 : it->second;
        const double res = std::fabs(got - c2) / std::max(1.0, std::fabs(c2));
        rep.worst_cocycle = std::max(rep.worst_cocycle, res);
        if (res > opt.tol)
          add_failure(rep.failures, "cocycle",
                      pair_witness(name(tau) + " -> " + name(l2), px, pz), res);
      }
    }
  }

  /* polynomial sector: the realization of a bounded monomial matches the
     corresponding coordinate monomial of the character pointwise */
  if (m.space() == Space::Base) {
    for (SymbolId tau : carrier) {
      const SymbolData& sd = s.symbol(tau);
      if (!sd.is_poly()) continue;
      Field expect = Field::constant(grid, 1.0);
      if (sd.kind == SymbolKind::BPoly) {
        for (int axis = 0; axis < s.dim(); ++axis) {
          const int k = int(axis == 0 ? sd.mindex.k[0] : sd.mindex.k[1]);
          if (k == 0) continue;
          SymbolId cid = s.find(Space::Plus, coordinate_name(sd.chart, axis));
          if (cid == kNoSymbol) fail(Errc::NotInBasis, "missing coordinate generator");
          expect = expect * pow_field(g.eval(cid), k);
        }
      }
      const double res = linf_diff(m.pi(tau), expect);
      rep.worst_poly = std::max(rep.worst_poly, res);
      if (res > opt.poly_tol) add_failure(rep.failures, "polynomial-sector", name(tau), res);
    }
  }

  rep.ok = rep.failures.empty();
  return rep;
}

/* --- model norms ---------------------------------------------------------------- */

std::string ModelNormReport::summary() const {
  std::ostringstream os;
  os << (ok ? "pass" : "FAIL") << ": |g| " << g_sup << ", g-ratio " << g_ratio_sup
     << ", pairing-ratio " << pi_ratio_sup << ", window [" << coarsest_level << ", "
     << finest_level << "]";
  auto rows = [&](const char* tag, const std::vector<ScalingRow>& v) {
    for (const auto& r : v)
      if (r.flagged)
        os << "\n  " << tag << " " << r.name << ": declared " << r.declared << ", measured "
           << r.estimated << " over " << r.points << " levels";
  };
  rows("g", g_scaling);
  rows("pi", pi_scaling);
  return os.str();
}

ModelNormReport model_norms(const Model& m, const MollifierFamily& mf,
                            const ModelNormOptions& opt) {
  const ConcreteStructure& s = m.structure();
  const CharacterField& g = m.g();
  const Grid& grid = m.grid();
  if (!(mf.grid == grid)) fail(Errc::InvalidArgument, "mollifier grid mismatch");
  ModelNormReport rep;
  DetRng rng(opt.seed);
  const std::vector<size_t> base = stratified_nodes(grid, opt.base_points, rng);

  const int finest =
      std::min(opt.finest_level > 0 ? opt.finest_level : mf.levels.back(), grid.L - 2);
  const int coarsest = std::max(opt.coarsest_level, mf.levels.front());
  if (finest < coarsest + 1) fail(Errc::InvalidArgument, "empty dyadic window for model norms");
  rep.coarsest_level = coarsest;
  rep.finest_level = finest;

  /* character side: sups and dyadic-separation scaling per basis symbol */
  for (SymbolId tau : s.basis(Space::Plus)) {
    ScalingRow row;
    row.id = tau;
    row.name = s.symbol(tau).name;
    row.declared = hom_of(s, tau);
    const Field& v = g.eval(tau);
    for (size_t p : base) rep.g_sup = std::max(rep.g_sup, std::fabs(v[p]));
    std::vector<std::pair<int, double>> level_values;
    for (int j = coarsest; j <= finest; ++j) {
      const int off = grid.n() >> j;
      double worst = 0.0;
      for (size_t px : base)
        for (int axis = 0; axis < grid.dim; ++axis) {
          size_t py;
          if (grid.dim == 1) {
            py = grid.at(int(px) + off);
          } else {
            const int i0 = int(px) / grid.n(), j0 = int(px) % grid.n();
            py = axis == 0 ? grid.at(i0 + off, j0) : grid.at(i0, j0 + off);
          }
          worst = std::max(worst, std::fabs(g.g_yx_at(tau, py, px)));
        }
      level_values.emplace_back(j, worst);
      if (worst > 0.0)
        row.sup_ratio = std::max(row.sup_ratio, worst * std::pow(2.0, double(j) * row.declared));
    }
    const SlopeFit fit = decay_slope(level_values);
    row.points = fit.points;
    row.estimated = fit.points >= 2 ? fit.slope : row.declared;
    row.shortfall = std::max(0.0, row.declared - row.estimated);
    double peak = 0.0;
    for (const auto& [j, v2] : level_values) peak = std::max(peak, v2);
    row.flagged = fit.points >= 2 && peak > 1e-12 && row.shortfall > opt.slack;
    rep.g_ratio_sup = std::max(rep.g_ratio_sup, row.sup_ratio);
    rep.g_scaling.push_back(row);
  }

  /* realization side: mollifier pairings of the recentred realization. The
     pairing <Pi_x^g sigma, phi_x^lambda> contracts, leg by leg, a spectral
     correlation of Pi(left) with the inverse-character value at the base
     point, so all base points share the same transforms. */
  std::vector<int> level_indices;
  for (size_t li = 0; li < mf.levels.size(); ++li)
    if (mf.levels[li] >= coarsest && mf.levels[li] <= finest) level_indices.push_back(int(li));

  std::map<SymbolId, std::vector<std::vector<Field>>> corr;  // left id -> [member][li]
  for (SymbolId tau : m.carrier()) {
    for (const auto& t : s.row(tau)) {
      if (corr.count(t.left)) continue;
      auto& slot = corr[t.left];
      slot.resize(size_t(mf.members()));
      for (int mbr = 0; mbr < mf.members(); ++mbr)
        for (int li : level_indices)
          slot[size_t(mbr)].push_back(mollifier_pairing_field(mf, mbr, li, m.pi(t.left)));
    }
  }

  for (SymbolId sigma : m.carrier()) {
    ScalingRow row;
    row.id = sigma;
    row.name = s.symbol(sigma).name;
    row.declared = hom_of(s, sigma);
    std::vector<std::pair<int, double>> level_values;
    for (size_t li_pos = 0; li_pos < level_indices.size(); ++li_pos) {
      const int j = mf.levels[size_t(level_indices[li_pos])];
      double worst = 0.0;
      for (size_t px : base) {
        for (int mbr = 0; mbr < mf.members(); ++mbr) {
          double pairing = 0.0;
          for (const auto& t : s.row(sigma))
            pairing += to_double(t.coeff) * g.inv_eval(t.right)[px] *
                       corr.at(t.left)[size_t(mbr)][li_pos][px];
          worst = std::max(worst, std::fabs(pairing));
        }
      }
      level_values.emplace_back(j, worst);
      if (worst > 0.0)
        row.sup_ratio = std::max(row.sup_ratio, worst * std::pow(2.0, double(j) * row.declared));
    }
    const SlopeFit fit = decay_slope(level_values);
    row.points = fit.points;
    row.estimated = fit.points >= 2 ? fit.slope : row.declared;
    row.shortfall = std::max(0.0, row.declared - row.estimated);
    double peak = 0.0;
    for (const auto& [j, v2] : level_values) peak = std::max(peak, v2);
    row.flagged = fit.points >= 2 && peak > 1e-12 && row.shortfall > opt.slack;
    rep.pi_ratio_sup = std::max(rep.pi_ratio_sup, row.sup_ratio);
    rep.pi_scaling.push_back(row);
  }

  for (const auto& r : rep.g_scaling) rep.ok = rep.ok && !r.flagged;
  for (const auto& r : rep.pi_scaling) rep.ok = rep.ok && !r.flagged;
  return rep;
}

/* --- canonical models ------------------------------------------------------------ */

void install_polynomial_sector(CharacterField& g, std::map<SymbolId, Field>& pi,
                               const PartitionOfUnity& pu) {
  const ConcreteStructure& s = g.structure();
  if (!(pu.grid == g.grid())) fail(Errc::InvalidArgument, "partition grid mismatch");
  if (pu.chart_count() != s.chart_count())
    fail(Errc::InvalidArgument, "partition chart count does not match the structure");
  for (SymbolId id : s.plus_generators()) {
    const SymbolData& sd = s.symbol(id);
    if (sd.kind != SymbolKind::Coordinate) continue;
    g.set_generator(id, pu.coord[size_t(sd.chart)][size_t(sd.axis)]);
  }
  for (SymbolId id : s.basis(Space::Base)) {
    const SymbolData& sd = s.symbol(id);
    if (!sd.is_poly()) continue;
    Field f = Field::constant(g.grid(), 1.0);
    if (sd.kind == SymbolKind::BPoly)
      for (int axis = 0; axis < s.dim(); ++axis) {
        const int k = int(axis == 0 ? sd.mindex.k[0] : sd.mindex.k[1]);
        if (k > 0) f = f * pow_field(pu.coord[size_t(sd.chart)][size_t(axis)], k);
      }
    pi[id] = std::move(f);
  }
}

Model canonical_polynomial_model(const ConcreteStructure& s, const PartitionOfUnity& pu) {
  for (SymbolId id : s.basis(Space::Base))
    if (!s.symbol(id).is_poly())
      fail(Errc::InvalidArgument, "canonical polynomial model needs a polynomial structure");
  CharacterField g(s, pu.grid);
  std::map<SymbolId, Field> pi;
  install_polynomial_sector(g, pi, pu);
  g.finalize();
  return Model(std::move(g), std::move(pi), "canonical-polynomial");
}

Model canonical_plus_model(const CharacterField& g) {
  if (!g.finalized()) fail(Errc::UndefinedCharacter, "character field not finalized");
  std::map<SymbolId, Field> pi;
  for (SymbolId id : g.structure().basis(Space::Plus)) pi.emplace(id, g.eval(id));
  return Model(g, std::move(pi), "canonical-plus", Space::Plus);
}

/* --- modelled distributions -------------------------------------------------------- */

Field ModelledDistribution::coefficient(SymbolId id) const {
  auto it = coeff.find(id);
  return it == coeff.end() ? Field::zeros(grid) : it->second;
}

ModelledDistribution h_tau(const CharacterField& g, SymbolId tau) {
  const ConcreteStructure& s = g.structure();
  if (s.symbol(tau).space != Space::Base)
    fail(Errc::InvalidArgument, "tautological lift expects a comodule symbol");
  ModelledDistribution f;
  f.space = Space::Base;
  f.gamma = hom_of(s, tau);
  f.grid = g.grid();
  for (const auto& [l, q] : strict_subs(s, tau)) f.coeff.emplace(l, g.eval(q));
  return f;
}

ModelledDistribution md_quotient(const ConcreteStructure& s, const ModelledDistribution& f,
                                 SymbolId tau) {
  if (f.space != Space::Base)
    fail(Errc::InvalidArgument, "quotient expects a comodule-side modelled distribution");
  ModelledDistribution out;
  out.space = Space::Plus;
  out.gamma = f.gamma - hom_of(s, tau);
  out.grid = f.grid;
  std::map<SymbolId, std::vector<double>> acc;
  for (const auto& [sig, field] : f.coeff) {
    const Vec q = quotient(s, sig, tau);
    for (const auto& [id, c] : q.terms) {
      auto [it, fresh] = acc.try_emplace(id, std::vector<double>(f.grid.size(), 0.0));
      axpy(it->second, to_double(c), field);
    }
  }
  for (auto& [id, v] : acc) out.coeff.emplace(id, Field(f.grid, std::move(v)));
  return out;
}

ModelledDistribution polynomial_lift(const ConcreteStructure& s, const PartitionOfUnity& pu,
                                     const Field& f, double r) {
  const LiftCoefficients lc = lift_coefficients(pu, f, r);
  ModelledDistribution out;
  out.space = Space::Base;
  out.gamma = r;
  out.grid = pu.grid;
  std::map<SymbolId, std::vector<double>> acc;
  for (int e = 0; e < pu.chart_count(); ++e)
    for (size_t oi = 0; oi < lc.orders.size(); ++oi) {
      const MultiIndex& k = lc.orders[oi];
      SymbolId id;
      if (k.is_zero()) {
        id = s.unit(Space::Base);
      } else {
        id = s.find(Space::Base, bpoly_name(s.dim(), e, k));
        if (id == kNoSymbol)
          fail(Errc::NotInBasis,
               "structure lacks the monomial " + bpoly_name(s.dim(), e, k) +
                   " required at this order");
      }
      auto [it, fresh] = acc.try_emplace(id, std::vector<double>(pu.grid.size(), 0.0));
      axpy(it->second, 1.0, lc.coeff[size_t(e)][oi]);
    }
  for (auto& [id, v] : acc) out.coeff.emplace(id, Field(pu.grid, std::move(v)));
  return out;
}

std::string DGammaReport::summary() const {
  std::ostringstream os;
  os << (ok ? "pass" : "FAIL") << ": static " << static_bound << ", increments " << norm_estimate;
  for (const auto& r : grades)
    if (r.flagged)
      os << "\n  grade " << r.grade << ": expected decay " << (r.grade) << ", measured "
         << r.estimated << " over " << r.points << " levels";
  return os.str();
}

DGammaReport d_gamma_norms(const ModelledDistribution& f, const CharacterField& g,
                           const PairSampler& sampler) {
  const ConcreteStructure& s = g.structure();
  const Grid& grid = g.grid();
  if (!(f.grid == grid)) fail(Errc::InvalidArgument, "modelled distribution grid mismatch");
  const size_t n = grid.size();
  DGammaReport rep;

  /* carrier symbols that can receive increment mass, and the quotient vectors
     pushing the stored coefficients onto them */
  struct Slot {
    SymbolId sig0;
    double grade;
    const Field* own;  // may be null
    std::vector<std::pair<const Field*, Vec>> higher;
  };
  std::vector<Slot> slots;
  for (SymbolId sig0 : s.basis(f.space)) {
    if (hom_of(s, sig0) >= f.gamma) continue;
    Slot slot;
    slot.sig0 = sig0;
    slot.grade = hom_of(s, sig0);
    auto it = f.coeff.find(sig0);
    slot.own = it == f.coeff.end() ? nullptr : &it->second;
    for (const auto& [tau, field] : f.coeff) {
      if (tau == sig0) continue;
      Vec q = quotient(s, tau, sig0);
      if (!q.is_zero()) slot.higher.emplace_back(&field, std::move(q));
    }
    if (slot.own || !slot.higher.empty()) slots.push_back(std::move(slot));
  }

  std::map<double, GradeRow> rows;
  for (const auto& slot : slots) {
    auto [it, fresh] = rows.try_emplace(slot.grade);
    it->second.grade = slot.grade;
    if (slot.own)
      it->second.static_sup = std::max(it->second.static_sup, linf(*slot.own));
  }

  auto increment = [&](const Slot& slot, size_t py, size_t px) {
    double v = 0.0;
    if (slot.own) v += (*slot.own)[py] - (*slot.own)[px];
    for (const auto& [field, q] : slot.higher) v -= g.g_yx_at(q, py, px) * (*field)[px];
    return v;
  };

  std::map<double, std::map<int, double>> dyadic;  // grade -> level -> worst
  auto feed = [&](size_t px, size_t py, int level) {
    const double dist = torus_dist(grid, px, py);
    if (dist <= 0.0) return;
    for (const auto& slot : slots) {
      const double inc = std::fabs(increment(slot, py, px));
      GradeRow& row = rows[slot.grade];
      row.sup_ratio = std::max(row.sup_ratio, inc / std::pow(dist, f.gamma - slot.grade));
      if (level >= 0) {
        double& cell = dyadic[slot.grade][level];
        cell = std::max(cell, inc);
      }
    }
  };

  DetRng rng(sampler.seed);
  const int finest =
      std::min(sampler.finest_level > 0 ? sampler.finest_level : grid.L - 2, grid.L - 2);
  const int coarsest = sampler.coarsest_level;
  /* random pairs stay within the locality radius 2^-coarsest: coordinates
     saturate beyond the chart plateau, so wider separations say nothing
     about the Holder grading */
  const int max_off = std::max(1, grid.n() >> coarsest);
  auto signed_offset = [&]() {
    int o = 1 + int(rng.next_u64() % uint64_t(max_off));
    return (rng.next_u64() & 1) ? -o : o;
  };
  for (int k = 0; k < sampler.random_pairs; ++k) {
    const size_t px = size_t(rng.next_u64() % n);
    size_t py;
    if (grid.dim == 1) {
      py = grid.at(int(px) + signed_offset());
    } else {
      const int i0 = int(px) / grid.n(), j0 = int(px) % grid.n();
      py = grid.at(i0 + signed_offset(), j0 + signed_offset());
    }
    if (px == py) continue;
    feed(px, py, -1);
  }
  if (finest >= coarsest + 1) {
    for (int j = coarsest; j <= finest; ++j) {
      const int off = grid.n() >> j;
      const std::vector<size_t> base = stratified_nodes(grid, sampler.dyadic_base_points, rng);
      for (size_t px : base)
        for (int axis = 0; axis < grid.dim; ++axis) {
          size_t py;
          if (grid.dim == 1) {
            py = grid.at(int(px) + off);
          } else {
            const int i0 = int(px) / grid.n(), j0 = int(px) % grid.n();
            py = axis == 0 ? grid.at(i0 + off, j0) : grid.at(i0, j0 + off);
          }
          feed(px, py, j);
        }
    }
  }

  for (auto& [grade, row] : rows) {
    std::vector<std::pair<int, double>> level_values;
    for (const auto& [j, v] : dyadic[grade]) level_values.emplace_back(j, v);
    const SlopeFit fit = decay_slope(level_values);
    const double expect = f.gamma - grade;
    row.points = fit.points;
    row.estimated = fit.points >= 2 ? fit.slope : expect;
    row.shortfall = std::max(0.0, expect - row.estimated);
    double peak = 0.0;
    for (const auto& [j, v] : level_values) peak = std::max(peak, v);
    row.flagged = fit.points >= 2 && peak > 1e-12 && row.shortfall > sampler.slack;
    rep.static_bound = std::max(rep.static_bound, row.static_sup);
    rep.norm_estimate = std::max(rep.norm_estimate, row.sup_ratio);
    rep.ok = rep.ok && !row.flagged;
    rep.grades.push_back(row);
  }
  return rep;
}

/* --- persistence --------------------------------------------------------------------- */

void save_model(const Model& m, const std::string& prefix) {
  const ConcreteStructure& s = m.structure();
  nlohmann::json j;
  char hex[24];
  std::snprintf(hex, sizeof hex, "%016" PRIx64, s.content_hash());
  j["format"] = "reconkit-model-1";
  j["structure"] = hex;
  j["grid"] = m.grid().str();
  j["space"] = m.space() == Space::Plus ? "plus" : "base";
  j["provenance"] = m.provenance();
  j["validated"] = m.validated();
  std::vector<std::string> pi_names;
  std::vector<Field> fields;
  for (SymbolId id : m.carrier()) {
    pi_names.push_back(s.symbol(id).name);
    fields.push_back(m.pi(id));
  }
  std::vector<std::string> gen_names;
  for (SymbolId id : s.plus_generators()) {
    gen_names.push_back(s.symbol(id).name);
    fields.push_back(m.g().eval(id));
  }
  j["pi"] = pi_names;
  j["generators"] = gen_names;
  atomic_write(prefix + ".json", j.dump(2) + "\n");
  save_fields(prefix + ".rkf", m.grid(), fields);
}

Model load_model(const std::string& prefix, const ConcreteStructure& s) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(prefix + ".json"));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, std::string("model header: ") + e.what());
  }
  try {
    if (j.at("format") != "reconkit-model-1")
      fail(Errc::ParseError, "unknown model format tag");
    char hex[24];
    std::snprintf(hex, sizeof hex, "%016" PRIx64, s.content_hash());
    if (j.at("structure") != std::string(hex))
      fail(Errc::InvalidArgument, "model was built against a different structure");
    Grid g_out;
    std::vector<Field> fields = load_fields(prefix + ".rkf", &g_out);
    if (j.at("grid") != g_out.str())
      fail(Errc::ParseError, "model header grid disagrees with the field container");
    const Space space = j.at("space") == "plus" ? Space::Plus : Space::Base;
    const std::vector<std::string> pi_names = j.at("pi");
    const std::vector<std::string> gen_names = j.at("generators");
    if (fields.size() != pi_names.size() + gen_names.size())
      fail(Errc::ParseError, "field count disagrees with the model header");
    CharacterField g(s, g_out);
    for (size_t i = 0; i < gen_names.size(); ++i)
      g.set_generator(s.require(Space::Plus, gen_names[i]), fields[pi_names.size() + i]);
    g.finalize();
    std::map<SymbolId, Field> pi;
    for (size_t i = 0; i < pi_names.size(); ++i)
      pi.emplace(s.require(space, pi_names[i]), fields[i]);
    Model m(std::move(g), std::move(pi), j.value("provenance", std::string()), space);
    if (j.value("validated", false)) m.mark_validated();
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, std::string("model header: ") + e.what());
  }
}

}  // namespace reconkit
