#pragma once

#include <vector>

#include "reconkit/field.hpp"
#include "reconkit/grid.hpp"
#include "reconkit/symbols.hpp"

namespace reconkit {

/* Chart system on the torus: 4^dim overlapping charts centered on the quarter
   lattice, enumerated in row-major axis order (chart e has axis-a center
   (e / 4^(dim-1-a) mod 4) / 4).

   phi: nonnegative bumps summing to one at every node, each supported in the
   open box of half-width 3/16 around its center, with all derivatives
   vanishing at the box boundary.  coord: per-chart coordinate fields, equal
   to the centered (wrapped) coordinate on the bump box, tapering to zero at
   half-width 1/4 and bounded by one. */
struct PartitionOfUnity {
  Grid grid;
  std::vector<Field> phi;                // one per chart
  std::vector<std::vector<Field>> coord; // coord[e][axis]

  int chart_count() const { return int(phi.size()); }

  /* Center coordinate of chart e along the given axis. */
  static double center(int e, int axis, int dim);
};

/* Builds the chart system on the given grid.  Needs at least 64 nodes per
   axis (L >= 6) to resolve the bump profile. */
PartitionOfUnity partition_of_unity(const Grid& g);

/* Per-axis profiles, exposed for diagnostics: the bump of half-width 3/16
   (plateau inside 1/16, boundary-flat step across the overlap, neighbors
   summing to one exactly), and the coordinate taper (identity inside 3/16,
   zero outside 1/4). Both take the wrapped centered coordinate. */
double pu_bump_profile(double t);
double pu_coord_profile(double t);

/* Coefficient fields of the patched expansion of f to order r: for each
   chart e and multi-index |k| < r, the field D^k(phi_e f) / k!, with
   derivatives taken spectrally.  orders lists the multi-indices, shared
   across charts; coeff[e][i] pairs with orders[i]. */
struct LiftCoefficients {
  double r = 0;
  std::vector<MultiIndex> orders;
  std::vector<std::vector<Field>> coeff;
};

LiftCoefficients lift_coefficients(const PartitionOfUnity& pu, const Field& f, double r);

}  // namespace reconkit
