#include "reconkit/partition.hpp"

#include <cmath>

#include "reconkit/errors.hpp"
#include "reconkit/fft.hpp"

namespace reconkit {

namespace {

constexpr double kInner = 3.0 / 16.0;  // bump half-width
constexpr double kOuter = 1.0 / 4.0;   // coordinate support half-width

double wrap_centered(double t) {
  t -= std::floor(t);
  return t >= 0.5 ? t - 1.0 : t;
}

double blob(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

}  // namespace

double pu_bump_profile(double t) {
  // Plateau of half-width 1/16, then a boundary-flat step across the overlap
  // with the neighboring chart.  The step parameters of the two charts
  // covering a point mirror each other exactly, so their profiles sum to one
  // without any normalization pass.
  const double a = std::abs(t);
  if (a >= kInner) return 0.0;
  const double step = 2.0 * kInner - kOuter;  // overlap width 1/8
  if (a <= kInner - step) return 1.0;
  const double s = (kInner - a) / step;
  return blob(s) / (blob(s) + blob(1.0 - s));
}

double pu_coord_profile(double t) {
  const double a = std::abs(t);
  if (a >= kOuter) return 0.0;
  if (a <= kInner) return t;
  const double s = (kOuter - a) / (kOuter - kInner);
  return t * blob(s) / (blob(s) + blob(1.0 - s));
}

double PartitionOfUnity::center(int e, int axis, int dim) {
  const int c = dim == 1 ? e : (axis == 0 ? e / 4 : e % 4);
  return 0.25 * c;
}

PartitionOfUnity partition_of_unity(const Grid& g) {
  if (g.L < 6)
    fail(Errc::InvalidArgument,
         "partition of unity needs at least 64 nodes per axis to resolve the bumps");
  const int n = g.n();

  // Per-axis bump and coordinate profiles over one period.
  std::vector<std::vector<double>> axis_phi(4, std::vector<double>(size_t(n)));
  std::vector<std::vector<double>> axis_psi(4, std::vector<double>(size_t(n)));
  for (int j = 0; j < n; ++j) {
    const double x = double(j) / double(n);
    for (int c = 0; c < 4; ++c) {
      axis_phi[c][size_t(j)] = pu_bump_profile(wrap_centered(x - 0.25 * c));
      axis_psi[c][size_t(j)] = pu_coord_profile(wrap_centered(x - 0.25 * c));
    }
  }

  PartitionOfUnity pu;
  pu.grid = g;
  const int charts = g.dim == 1 ? 4 : 16;
  const size_t sz = g.size();
  for (int e = 0; e < charts; ++e) {
    std::vector<double> f(sz);
    std::vector<std::vector<double>> cs(size_t(g.dim), std::vector<double>(sz));
    if (g.dim == 1) {
      f = axis_phi[e];
      cs[0] = axis_psi[e];
    } else {
      const int c0 = e / 4, c1 = e % 4;
      for (size_t p = 0; p < sz; ++p) {
        const size_t j0 = p / size_t(n), j1 = p % size_t(n);
        f[p] = axis_phi[c0][j0] * axis_phi[c1][j1];
        cs[0][p] = axis_psi[c0][j0];
        cs[1][p] = axis_psi[c1][j1];
      }
    }
    pu.phi.emplace_back(g, std::move(f));
    std::vector<Field> coord_fields;
    for (auto& v : cs) coord_fields.emplace_back(g, std::move(v));
    pu.coord.push_back(std::move(coord_fields));
  }
  return pu;
}

LiftCoefficients lift_coefficients(const PartitionOfUnity& pu, const Field& f, double r) {
  const Grid& g = pu.grid;
  if (!(f.grid() == g)) fail(Errc::InvalidArgument, "field grid does not match the partition");
  if (!(r > 0)) fail(Errc::InvalidArgument, "expansion order must be positive");

  LiftCoefficients lc;
  lc.r = r;
  const int max_order = int(std::ceil(r)) - 1;
  lc.orders = indices_up_to(g.dim, max_order);
  lc.coeff.resize(size_t(pu.chart_count()));
  for (int e = 0; e < pu.chart_count(); ++e) {
    Field base = pu.phi[size_t(e)] * f;
    for (const MultiIndex& k : lc.orders) {
      Field dk = k.is_zero() ? base : derivative(base, int(k.k[0]), int(k.k[1]));
      lc.coeff[size_t(e)].push_back((1.0 / to_double(k.factorial_r())) * dk);
    }
  }
  return lc;
}

}  // namespace reconkit
