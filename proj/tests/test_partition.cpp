#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "reconkit/fft.hpp"
#include "reconkit/harmonic.hpp"
#include "reconkit/partition.hpp"
#include "support.hpp"

using namespace reconkit;
using rktest::check_error;
using rktest::running_recipe;

namespace {

constexpr double kPi = 3.14159265358979323846;

/* Independent reference for the per-axis chart profile: full on the inner
   sixteenth, zero beyond 3/16, boundary-flat smoothstep across the overlap
   strip in between. */
double ref_wrap(double t) {
  t -= std::floor(t);
  return t >= 0.5 ? t - 1.0 : t;
}

double ref_axis_phi(int c, double x) {
  double a = std::abs(ref_wrap(x - 0.25 * c));
  if (a >= 3.0 / 16.0) return 0.0;
  if (a <= 1.0 / 16.0) return 1.0;
  auto blob = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  double s = (3.0 / 16.0 - a) * 8.0;
  return blob(s) / (blob(s) + blob(1.0 - s));
}

/* Reference coordinate profile: identity inside the bump box, boundary-flat
   taper to zero at half-width 1/4. */
double ref_coord(double t) {
  const double inner = 3.0 / 16.0, outer = 0.25;
  double a = std::abs(t);
  if (a >= outer) return 0.0;
  if (a <= inner) return t;
  auto blob = [](double s) { return s <= 0.0 ? 0.0 : std::exp(-1.0 / s); };
  double s = (outer - a) / (outer - inner);
  double w = blob(s) / (blob(s) + blob(1.0 - s));
  return t * w;
}


/* Classical Holder norm of a band-limited field: max of sup norms of the
   derivatives up to the integer part, plus the top Holder quotient, all
   computed from exact spectral derivatives. */
double ref_holder(const Field& f, double r) {
  const int m = int(std::floor(r));
  const double s = r - m;
  const Grid& g = f.grid();
  std::vector<Field> tops;
  double best = linf(f);
  if (g.dim == 1) {
    Field d = f;
    for (int j = 1; j <= m; ++j) {
      d = derivative(d, 1);
      best = std::max(best, linf(d));
    }
    tops.push_back(d);
  } else {
    for (int k0 = 0; k0 <= m; ++k0)
      for (int k1 = 0; k1 + k0 <= m; ++k1) {
        if (k0 + k1 == 0) continue;
        Field d = derivative(f, k0, k1);
        best = std::max(best, linf(d));
        if (k0 + k1 == m) tops.push_back(d);
      }
    if (m == 0) tops.push_back(f);
  }
  const size_t n = g.size();
  double q = 0.0;
  const size_t strideP = g.dim == 1 ? 1 : 13;
  const size_t strideO = g.dim == 1 ? 1 : 7;
  for (const Field& top : tops)
    for (size_t p = 0; p < n; p += strideP)
      for (size_t o = 1; o < n; o += strideO) {
        size_t pq = (p + o) % n;
        double d0 = torus_diff(g.x0(pq), g.x0(p));
        double d1 = g.dim == 1 ? 0.0 : torus_diff(g.x1(pq), g.x1(p));
        double sep = std::hypot(d0, d1);
        if (sep == 0.0) continue;
        q = std::max(q, std::abs(top[pq] - top[p]) / std::pow(sep, s));
      }
  return std::max(best, q);
}

/* Fixed trigonometric test function of degree 8 with mildly irregular
   coefficients, plus its exact derivative. */
double trig8(double x) {
  double v = 0.3;
  for (int m = 1; m <= 8; ++m)
    v += std::cos(2 * kPi * m * x + 0.37 * m * m) / (1.0 + 0.55 * m);
  return v;
}

Field trig8_field(const Grid& g) {
  return sample(g, [](double x) { return trig8(x); });
}

}  // namespace

TEST_CASE("chart bumps form an exact nonnegative partition") {
  for (int dim : {1, 2}) {
    Grid g(dim, dim == 1 ? 8 : 6);
    PartitionOfUnity pu = partition_of_unity(g);
    REQUIRE(int(pu.phi.size()) == (dim == 1 ? 4 : 16));
    const size_t sz = g.size();
    double worst = 0.0;
    for (size_t p = 0; p < sz; ++p) {
      double sum = 0.0;
      for (const Field& f : pu.phi) {
        CHECK(f[p] >= 0.0);
        CHECK(f[p] <= 1.0);
        sum += f[p];
      }
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("chart bumps match the axis profile and stay in their box") {
  Grid g(1, 9);
  PartitionOfUnity pu = partition_of_unity(g);
  const size_t n = g.size();
  for (int e = 0; e < 4; ++e) {
    double c = PartitionOfUnity::center(e, 0, 1);
    CHECK(c == 0.25 * e);
    for (size_t p = 0; p < n; ++p) {
      double x = g.x0(p);
      CHECK(std::abs(pu.phi[e][p] - ref_axis_phi(e, x)) <= 1e-13);
      if (std::abs(ref_wrap(x - c)) >= 3.0 / 16.0) CHECK(pu.phi[e][p] == 0.0);
    }
  }
  // Two-axis bumps are tensor products of the axis profile.
  Grid g2(2, 6);
  PartitionOfUnity pu2 = partition_of_unity(g2);
  for (int e = 0; e < 16; ++e) {
    for (size_t p = 0; p < g2.size(); p += 37) {
      double expect = ref_axis_phi(e / 4, g2.x0(p)) * ref_axis_phi(e % 4, g2.x1(p));
      CHECK(std::abs(pu2.phi[e][p] - expect) <= 1e-13);
    }
  }
}

TEST_CASE("coordinate fields carry exact increments inside their chart") {
  Grid g(1, 9);
  PartitionOfUnity pu = partition_of_unity(g);
  const size_t n = g.size();
  for (int e = 0; e < 4; ++e) {
    double c = 0.25 * e;
    const Field& psi = pu.coord[e][0];
    std::vector<size_t> inside;
    for (size_t p = 0; p < n; ++p) {
      double t = ref_wrap(g.x0(p) - c);
      CHECK(std::abs(psi[p] - ref_coord(t)) <= 1e-13);
      CHECK(std::abs(psi[p]) <= 1.0);  // uniform bound on coordinate fields
      if (std::abs(t) >= 0.25) CHECK(psi[p] == 0.0);
      if (std::abs(t) < 3.0 / 16.0) inside.push_back(p);
    }
    // Exact increment property: differences of the coordinate field reproduce
    // torus differences of the points themselves, bitwise.
    for (size_t i = 0; i < inside.size(); i += 7)
      for (size_t j = 1; j < inside.size(); j += 11) {
        size_t p = inside[i], q = inside[j];
        CHECK(psi[q] - psi[p] == torus_diff(g.x0(q), g.x0(p)));
      }
  }
  // Two dimensions: each axis coordinate sees only its own axis.
  Grid g2(2, 6);
  PartitionOfUnity pu2 = partition_of_unity(g2);
  for (size_t p = 0; p < g2.size(); p += 29) {
    double t0 = ref_wrap(g2.x0(p) - 0.25);
    double t1 = ref_wrap(g2.x1(p) - 0.5);
    int e = 1 * 4 + 2;
    CHECK(std::abs(pu2.coord[e][0][p] - ref_coord(t0)) <= 1e-13);
    CHECK(std::abs(pu2.coord[e][1][p] - ref_coord(t1)) <= 1e-13);
  }
}

TEST_CASE("partition construction rejects unresolvable grids") {
  check_error([] { partition_of_unity(Grid(1, 5)); }, Errc::InvalidArgument);
  check_error([] { partition_of_unity(Grid(2, 5)); }, Errc::InvalidArgument);
}

TEST_CASE("lift coefficients of the constant function are the bumps themselves") {
  Grid g(1, 8);
  PartitionOfUnity pu = partition_of_unity(g);
  Field one = Field::constant(g, 1.0);
  LiftCoefficients lc = lift_coefficients(pu, one, 2.0);
  REQUIRE(lc.orders.size() == 2);  // k = 0 and k = 1
  Field sum0 = Field::constant(g, 0.0);
  Field sum1 = Field::constant(g, 0.0);
  for (int e = 0; e < 4; ++e) {
    CHECK(linf_diff(lc.coeff[e][0], pu.phi[e]) <= 1e-12);
    sum0 = sum0 + lc.coeff[e][0];
    sum1 = sum1 + lc.coeff[e][1];
  }
  CHECK(linf_diff(sum0, one) <= 1e-12);
  CHECK(linf(sum1) <= 1e-8);  // derivatives of a partition of unity cancel
}

TEST_CASE("patched expansion tracks the function at the prescribed order") {
  // sup over grid pairs of |remainder| / (B_r(f) |y-x|^r) stays under a fixed
  // constant for a trigonometric polynomial of degree 8.
  Grid g(1, 8);
  PartitionOfUnity pu = partition_of_unity(g);
  Field f = trig8_field(g);
  const size_t n = g.size();
  for (double r : {1.5, 2.5}) {
    LiftCoefficients lc = lift_coefficients(pu, f, r);
    double br = ref_holder(f, r);
    double worst = 0.0;
    for (size_t px = 0; px < n; ++px) {
      for (size_t py = 0; py < n; ++py) {
        if (px == py) continue;
        double sep = std::abs(torus_diff(g.x0(py), g.x0(px)));
        double taylor = 0.0;
        for (int e = 0; e < 4; ++e) {
          double dpsi = pu.coord[e][0][py] - pu.coord[e][0][px];
          double pw = 1.0;
          for (size_t oi = 0; oi < lc.orders.size(); ++oi) {
            taylor += lc.coeff[e][oi][px] * pw;
            pw *= dpsi;
          }
        }
        worst = std::max(worst, std::abs(f[py] - taylor) / (br * std::pow(sep, r)));
      }
    }
    CHECK(worst <= 10.0);
  }
}

TEST_CASE("patched expansion order holds on two-axis grids") {
  Grid g(2, 6);
  PartitionOfUnity pu = partition_of_unity(g);
  Field f = sample2(g, [](double x, double y) {
    return std::sin(2 * kPi * x) * std::cos(2 * kPi * y) + 0.5 * std::cos(2 * kPi * (x + 2 * y));
  });
  const double r = 1.5;
  LiftCoefficients lc = lift_coefficients(pu, f, r);
  double br = ref_holder(f, r);
  const size_t sz = g.size();
  double worst = 0.0;
  for (size_t px = 0; px < sz; px += 23) {
    for (size_t py = 0; py < sz; py += 17) {
      if (px == py) continue;
      double d0 = torus_diff(g.x0(py), g.x0(px));
      double d1 = torus_diff(g.x1(py), g.x1(px));
      double sep = std::hypot(d0, d1);
      double taylor = 0.0;
      for (int e = 0; e < 16; ++e) {
        double a0 = pu.coord[e][0][py] - pu.coord[e][0][px];
        double a1 = pu.coord[e][1][py] - pu.coord[e][1][px];
        for (size_t oi = 0; oi < lc.orders.size(); ++oi) {
          const MultiIndex& k = lc.orders[oi];
          taylor += lc.coeff[e][oi][px] * std::pow(a0, int(k.k[0])) * std::pow(a1, int(k.k[1]));
        }
      }
      worst = std::max(worst, std::abs(f[py] - taylor) / (br * std::pow(sep, r)));
    }
  }
  CHECK(worst <= 10.0);
}

TEST_CASE("patched expansion remainder decays at the full cubic rate") {
  // Third-order expansion of a single sine: remainder over dyadic separations
  // fits a slope within 0.15 of the order.
  Grid g(1, 10);
  PartitionOfUnity pu = partition_of_unity(g);
  Field f = sample(g, [](double x) { return std::sin(2 * kPi * x); });
  LiftCoefficients lc = lift_coefficients(pu, f, 3.0);
  const size_t n = g.size();
  std::vector<double> lsep, lrem;
  for (int j = 3; j <= 7; ++j) {
    size_t stride = n >> j;  // separation 2^-j
    double worst = 0.0;
    for (size_t px = 0; px < n; px += 5) {
      size_t py = (px + stride) % n;
      double taylor = 0.0;
      for (int e = 0; e < 4; ++e) {
        double dpsi = pu.coord[e][0][py] - pu.coord[e][0][px];
        double pw = 1.0;
        for (size_t oi = 0; oi < lc.orders.size(); ++oi) {
          taylor += lc.coeff[e][oi][px] * pw;
          pw *= dpsi;
        }
      }
      worst = std::max(worst, std::abs(f[py] - taylor));
    }
    lsep.push_back(-double(j) * std::log(2.0));
    lrem.push_back(std::log(worst));
  }
  // Least squares slope of log remainder against log separation.
  double mx = 0, my = 0;
  for (size_t i = 0; i < lsep.size(); ++i) mx += lsep[i], my += lrem[i];
  mx /= double(lsep.size()), my /= double(lsep.size());
  double num = 0, den = 0;
  for (size_t i = 0; i < lsep.size(); ++i) {
    num += (lsep[i] - mx) * (lrem[i] - my);
    den += (lsep[i] - mx) * (lsep[i] - mx);
  }
  CHECK(num / den >= 3.0 - 0.15);
}

TEST_CASE("polynomial dual extraction reads the coproduct column") {
  ConcreteStructure s = build_tree_structure(running_recipe());
  SymbolId itau = s.require(Space::Base, "I(I(Xi))");
  SymbolId xi = s.require(Space::Base, "Xi");

  // Zeroth extraction is the unit column: one order-zero decoration per chart.
  Vec d0 = d_extract(s, itau, 0, MultiIndex{{0, 0}});
  REQUIRE(d0.terms.size() == 4);
  for (int e = 0; e < 4; ++e) {
    SymbolId gen = s.require(Space::Plus, "I0+_e" + std::to_string(e) + "(I(Xi))");
    REQUIRE(d0.terms.count(gen) == 1);
    CHECK(d0.terms.at(gen) == Rational(1));
  }

  // First extraction against one chart recovers exactly the decorated
  // generator: the factorial in the extraction cancels the one in the row.
  Vec d1 = d_extract(s, itau, 0, MultiIndex{{1, 0}});
  SymbolId gen = s.require(Space::Plus, "I1+_e0(I(Xi))");
  REQUIRE(d1.terms.size() == 1);
  CHECK(d1.terms.begin()->first == gen);
  CHECK(d1.terms.begin()->second == Rational(1));

  // The rough noise admits no order-one decoration, and a noise row has no
  // polynomial legs at all.
  SymbolId ixi = s.require(Space::Base, "I(Xi)");
  CHECK(d_extract(s, ixi, 0, MultiIndex{{1, 0}}).is_zero());
  CHECK(d_extract(s, xi, 0, MultiIndex{{1, 0}}).is_zero());

  // Polynomial symbols are rejected.
  SymbolId xpoly = s.require(Space::Base, "X_e0");
  check_error([&] { d_extract(s, xpoly, 0, MultiIndex{{1, 0}}); }, Errc::InvalidArgument);
}
