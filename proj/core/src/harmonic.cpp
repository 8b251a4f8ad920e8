#include "reconkit/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "reconkit/errors.hpp"
#include "reconkit/fft.hpp"
#include "reconkit/parallel.hpp"
#include "reconkit/rng.hpp"

namespace reconkit {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double ebump(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
}  // namespace

double lp_profile(double t) {
  t = std::fabs(t);
  if (t <= 1.0) return 1.0;
  if (t >= 4.0 / 3.0) return 0.0;
  const double s = (4.0 / 3.0 - t) * 3.0;  // runs from 1 at t=1 down to 0 at t=4/3
  return ebump(s) / (ebump(s) + ebump(1.0 - s));
}

double lp_rho(int i, int j_max, double t) {
  if (i < -1 || i > j_max) fail(Errc::InvalidArgument, "block index out of range");
  if (i == -1) return lp_profile(t);
  if (i == j_max) return 1.0 - lp_profile(std::ldexp(t, -j_max));
  return lp_profile(std::ldexp(t, -i - 1)) - lp_profile(std::ldexp(t, -i));
}

Field lp_block(const Field& f, int i) {
  const int jm = lp_top(f.grid());
  if (i < -1 || i > jm) fail(Errc::InvalidArgument, "block index out of range");
  return apply_radial(f, [i, jm](double t) { return lp_rho(i, jm, t); });
}

std::vector<Field> lp_blocks(const Field& f) {
  const int jm = lp_top(f.grid());
  (void)spectrum_of(f);  // fill the cache once before fanning out
  std::vector<Field> out(size_t(jm + 2));
  parallel_for(out.size(), [&](size_t k) { out[k] = lp_block(f, int(k) - 1); });
  return out;
}

Field s_block(const Field& f, int j) {
  const int jm = lp_top(f.grid());
  if (j < 1 || j > jm) fail(Errc::InvalidArgument, "low-pass index out of range");
  return apply_radial(f, [j](double t) { return lp_profile(std::ldexp(t, 1 - j)); });
}

SpectralProfile spectral_profile(const Field& f) {
  auto blocks = lp_blocks(f);
  SpectralProfile p;
  p.m.reserve(blocks.size());
  for (const auto& b : blocks) p.m.push_back(linf(b));
  return p;
}

double besov_norm(const SpectralProfile& p, double alpha) {
  double norm = 0.0;
  for (int i = -1; i <= p.top(); ++i) norm = std::max(norm, std::exp2(alpha * i) * p.at(i));
  return norm;
}

double besov_norm(const Field& f, double alpha) { return besov_norm(spectral_profile(f), alpha); }

RegularityFit estimate_regularity(const SpectralProfile& p, int lo, int hi) {
  const int jm = p.top();
  if (lo < 2 || hi > jm - 1 || hi - lo + 1 < 4)
    fail(Errc::InvalidArgument, "regression window must span at least 4 blocks inside [2, top-1]");
  std::vector<double> xs, ys;
  for (int i = lo; i <= hi; ++i) {
    if (p.at(i) < 1e-13) continue;  // dead blocks say nothing about decay
    xs.push_back(double(i));
    ys.push_back(-std::log2(p.at(i)));
  }
  if (xs.size() < 2) fail(Errc::InsufficientData, "fewer than two live blocks in the window");
  const double n = double(xs.size());
  double mx = 0, my = 0;
  for (size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  RegularityFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (size_t k = 0; k < xs.size(); ++k) {
    const double r = ys[k] - (fit.intercept + fit.slope * xs[k]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.points = int(xs.size());
  return fit;
}

RegularityFit estimate_regularity(const Field& f, int lo, int hi) {
  return estimate_regularity(spectral_profile(f), lo, hi);
}

RegularityFit estimate_regularity(const Field& f) {
  const int jm = lp_top(f.grid());
  int lo = 3, hi = jm - 2;
  if (hi - lo + 1 < 4) {
    lo = 2;
    hi = jm - 1;
  }
  return estimate_regularity(f, lo, hi);
}

Field para(const Field& f, const Field& g) {
  if (f.grid() != g.grid()) fail(Errc::InvalidArgument, "paraproduct grids differ");
  const int jm = lp_top(f.grid());
  auto bf = lp_blocks(f);
  auto bg = lp_blocks(g);
  std::vector<double> low = bf[0].values();  // running S_j f, starting at S_1 = Delta_{-1}
  std::vector<double> acc(f.size(), 0.0);
  for (int j = 1; j <= jm; ++j) {
    if (j > 1) {
      const auto& add = bf[size_t(j - 1)].values();
      for (size_t p = 0; p < low.size(); ++p) low[p] += add[p];
    }
    const auto& dg = bg[size_t(j + 1)].values();
    for (size_t p = 0; p < acc.size(); ++p) acc[p] += low[p] * dg[p];
  }
  return Field(f.grid(), std::move(acc));
}

Field resonant(const Field& f, const Field& g) {
  if (f.grid() != g.grid()) fail(Errc::InvalidArgument, "resonant grids differ");
  const int jm = lp_top(f.grid());
  auto bf = lp_blocks(f);
  auto bg = lp_blocks(g);
  std::vector<double> acc(f.size(), 0.0);
  for (int i = -1; i <= jm; ++i) {
    const auto& df = bf[size_t(i + 1)].values();
    for (int j = std::max(i - 1, -1); j <= std::min(i + 1, jm); ++j) {
      const auto& dg = bg[size_t(j + 1)].values();
      for (size_t p = 0; p < acc.size(); ++p) acc[p] += df[p] * dg[p];
    }
  }
  return Field(f.grid(), std::move(acc));
}

Field smooth_part(const Field& f) {
  // f - P_1 f: the unit low-pass S_j 1 is identically 1, so the paraproduct
  // P_1 f collects every block above Delta_0 and the complement is the two
  // base blocks.
  return lp_block(f, -1) + lp_block(f, 0);
}

Field corrector(const Field& a, const Field& b, const Field& c) {
  return para(a, para(b, c)) - para(a * b, c);
}

Grid TwoVarFunction::grid() const {
  if (!rank.empty()) return rank.front().first.grid();
  if (dense) return dense->grid;
  fail(Errc::InvalidArgument, "two-variable kernel has no representation");
}

TwoVarFunction TwoVarFunction::outer(Field a, Field b) {
  if (a.grid() != b.grid()) fail(Errc::InvalidArgument, "outer factors live on different grids");
  TwoVarFunction lam;
  lam.rank.emplace_back(std::move(a), std::move(b));
  return lam;
}

namespace {
void check_rank_grids(const TwoVarFunction& lam) {
  const Grid g = lam.grid();
  for (const auto& [a, b] : lam.rank)
    if (a.grid() != g || b.grid() != g) fail(Errc::InvalidArgument, "rank term grid mismatch");
}

void check_dense_size(const TwoVarFunction& lam) {
  const size_t n = lam.dense->grid.size();
  if (lam.dense->values.size() != n * n)
    fail(Errc::InvalidArgument, "dense kernel size does not match its grid");
}

void guard_dense(const TwoVarFunction& lam, bool force) {
  if (!lam.dense) fail(Errc::InvalidArgument, "no dense representation available");
  const Grid& g = lam.dense->grid;
  if (!force && (g.dim != 1 || g.L > 12))
    fail(Errc::ResourceLimit,
         "dense two-variable pass limited to one-dimensional grids up to level 12; "
         "pass force to override");
}

/* One diagonal block of the dense kernel: Delta_j along the second slot
   (contiguous rows), then S_j along the first slot (strided columns),
   evaluated on the diagonal. */
Field dense_block(const DenseKernel& k, int j) {
  const Grid& g = k.grid;
  const size_t n = g.size();
  std::vector<double> rows(n * n);
  std::vector<double> scratch(n);
  for (size_t p = 0; p < n; ++p) {
    std::copy(k.values.begin() + long(p * n), k.values.begin() + long((p + 1) * n), scratch.begin());
    Field row(g, scratch);
    Field filtered = lp_block(row, j);
    const auto& fv = filtered.values();
    std::copy(fv.begin(), fv.end(), rows.begin() + long(p * n));
  }
  std::vector<double> diag(n);
  for (size_t q = 0; q < n; ++q) {
    for (size_t p = 0; p < n; ++p) scratch[p] = rows[p * n + q];
    Field col(g, scratch);
    Field low = s_block(col, j);
    diag[q] = low[q];
  }
  return Field(g, std::move(diag));
}
}  // namespace

double two_var_mismatch(const TwoVarFunction& lam) {
  if (lam.rank.empty() || !lam.dense)
    fail(Errc::InvalidArgument, "mismatch check needs both representations");
  check_rank_grids(lam);
  check_dense_size(lam);
  if (lam.dense->grid != lam.grid()) fail(Errc::InvalidArgument, "representation grids differ");
  const size_t n = lam.grid().size();
  double worst = 0.0;
  for (size_t p = 0; p < n; ++p)
    for (size_t q = 0; q < n; ++q) {
      double v = 0.0;
      for (const auto& [a, b] : lam.rank) v += a[p] * b[q];
      worst = std::max(worst, std::fabs(v - lam.dense->values[p * n + q]));
    }
  return worst;
}

double two_var_at(const TwoVarFunction& lam, size_t p, size_t q) {
  if (!lam.rank.empty()) {
    double v = 0.0;
    for (const auto& [a, b] : lam.rank) v += a[p] * b[q];
    return v;
  }
  if (lam.dense) return lam.dense->values[p * lam.dense->grid.size() + q];
  fail(Errc::InvalidArgument, "two-variable kernel has no representation");
}

Field two_var_fix_first(const TwoVarFunction& lam, size_t p) {
  const Grid g = lam.grid();
  if (!lam.rank.empty()) {
    check_rank_grids(lam);
    std::vector<double> out(g.size(), 0.0);
    for (const auto& [a, b] : lam.rank) {
      const double c = a[p];
      if (c == 0.0) continue;
      const std::vector<double>& bv = b.values();
      for (size_t q = 0; q < out.size(); ++q) out[q] += c * bv[q];
    }
    return Field(g, std::move(out));
  }
  if (lam.dense) {
    check_dense_size(lam);
    const size_t n = g.size();
    std::vector<double> out(lam.dense->values.begin() + long(p * n),
                            lam.dense->values.begin() + long((p + 1) * n));
    return Field(g, std::move(out));
  }
  fail(Errc::InvalidArgument, "two-variable kernel has no representation");
}

Field para2_block(const TwoVarFunction& lam, int j) {
  const Grid g = lam.grid();
  const int jm = lp_top(g);
  if (j < 1 || j > jm) fail(Errc::InvalidArgument, "diagonal block index out of range");
  if (!lam.rank.empty()) {
    check_rank_grids(lam);
    Field acc = Field::zeros(g);
    for (const auto& [a, b] : lam.rank) acc = acc + s_block(a, j) * lp_block(b, j);
    return acc;
  }
  guard_dense(lam, false);
  check_dense_size(lam);
  return dense_block(*lam.dense, j);
}

Field para2_rank(const TwoVarFunction& lam) {
  if (lam.rank.empty()) fail(Errc::InvalidArgument, "no rank representation available");
  check_rank_grids(lam);
  Field acc = Field::zeros(lam.grid());
  for (const auto& [a, b] : lam.rank) acc = acc + para(a, b);
  return acc;
}

Field para2_dense(const TwoVarFunction& lam, bool force) {
  guard_dense(lam, force);
  check_dense_size(lam);
  const Grid& g = lam.dense->grid;
  const int jm = lp_top(g);
  Field acc = Field::zeros(g);
  for (int j = 1; j <= jm; ++j) acc = acc + dense_block(*lam.dense, j);
  return acc;
}

Field para2(const TwoVarFunction& lam, bool force) {
  if (!lam.rank.empty()) return para2_rank(lam);
  return para2_dense(lam, force);
}

Field lp_kernel(const Grid& g, int j) {
  const int jm = lp_top(g);
  if (j < -1 || j > jm) fail(Errc::InvalidArgument, "block index out of range");
  SpectrumData s;
  s.grid = g;
  s.coef.resize(spectrum_size(g));
  const int n = g.n();
  if (g.dim == 1) {
    for (int m = 0; m <= n / 2; ++m) s.coef[size_t(m)] = lp_rho(j, jm, double(m));
  } else {
    const int half = n / 2 + 1;
    for (int m0 = 0; m0 < n; ++m0) {
      const double x0 = signed_freq(m0, n);
      for (int m1 = 0; m1 < half; ++m1)
        s.coef[size_t(m0) * size_t(half) + size_t(m1)] =
            lp_rho(j, jm, std::sqrt(x0 * x0 + double(m1) * m1));
    }
  }
  return synthesize(s);
}

double lp_kernel_moment(const Grid& g, int j, double r) {
  Field k = lp_kernel(g, j);
  const double h = g.h();
  const double cell = g.dim == 1 ? h : h * h;
  double sum = 0.0;
  for (size_t p = 0; p < k.size(); ++p) {
    const double dx = std::min(g.x0(p), 1.0 - g.x0(p));
    const double dy = g.dim == 1 ? 0.0 : std::min(g.x1(p), 1.0 - g.x1(p));
    sum += std::fabs(k[p]) * std::pow(std::sqrt(dx * dx + dy * dy), r) * cell;
  }
  return sum;
}

Field noise_field(const Grid& g, double alpha, uint64_t seed) {
  DetRng rng(seed);
  const int n = g.n();
  SpectrumData s;
  s.grid = g;
  s.coef.assign(spectrum_size(g), {0.0, 0.0});
  const double sigma = 0.18;  // lognormal spread of the per-mode amplitude
  auto draw = [&](double absxi) {
    // The sqrt-log factor offsets the growth of a per-block maximum over
    // ~2^i independent modes, so sup-norm block profiles decay like 2^{-i*alpha}.
    const double amp = std::pow(1.0 + absxi, -alpha - 0.5 * g.dim) /
                       std::sqrt(1.0 + std::log2(1.0 + absxi)) *
                       std::exp(sigma * rng.normal());
    const double phase = kTwoPi * rng.uniform();
    return std::complex<double>(amp * std::cos(phase), amp * std::sin(phase));
  };
  if (g.dim == 1) {
    for (int m = 0; m <= n / 2; ++m) {
      std::complex<double> z = draw(double(m));
      if (m == 0 || m == n / 2) z = std::complex<double>(z.real(), 0.0);
      s.coef[size_t(m)] = z;
    }
  } else {
    const int half = n / 2 + 1;
    auto at = [&](int m0, int m1) -> std::complex<double>& {
      return s.coef[size_t(m0) * size_t(half) + size_t(m1)];
    };
    for (int m0 = 0; m0 < n; ++m0) {
      const double x0 = signed_freq(m0, n);
      for (int m1 = 1; m1 < n / 2; ++m1) at(m0, m1) = draw(std::sqrt(x0 * x0 + double(m1) * m1));
    }
    // the m1 = 0 and m1 = n/2 columns carry their own conjugate pairing
    for (int m1 : {0, n / 2}) {
      for (int m0 = 0; m0 <= n / 2; ++m0) {
        std::complex<double> z = draw(std::hypot(double(m0), double(m1)));
        if (m0 == 0 || m0 == n / 2) z = std::complex<double>(z.real(), 0.0);
        at(m0, m1) = z;
        if (m0 != 0 && m0 != n / 2) at(n - m0, m1) = std::conj(z);
      }
    }
  }
  return synthesize(s);
}

}  // namespace reconkit
