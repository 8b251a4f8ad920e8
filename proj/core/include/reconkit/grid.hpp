#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "reconkit/errors.hpp"

namespace reconkit {

/* Dyadic sampling grid on the periodic unit torus: 2^L points per axis,
   spacing 2^-L, row-major layout in dimension two. */
struct Grid {
  int dim = 1;
  int L = 8;

  Grid() = default;
  Grid(int dim_, int L_) : dim(dim_), L(L_) {
    if (dim != 1 && dim != 2) fail(Errc::InvalidArgument, "grid dimension must be 1 or 2");
    if (L < 2 || L > 24) fail(Errc::InvalidArgument, "grid level out of range [2,24]");
  }

  int n() const { return 1 << L; }
  size_t size() const { return dim == 1 ? size_t(n()) : size_t(n()) * size_t(n()); }
  double h() const { return 1.0 / double(n()); }

  int wrap(int i) const { return i & (n() - 1); }
  size_t at(int i) const { return size_t(wrap(i)); }
  size_t at(int i, int j) const { return size_t(wrap(i)) * size_t(n()) + size_t(wrap(j)); }

  /* coordinates of flat index p */
  double x0(size_t p) const { return double(dim == 1 ? p : p / size_t(n())) * h(); }
  double x1(size_t p) const { return dim == 1 ? 0.0 : double(p % size_t(n())) * h(); }

  bool operator==(const Grid&) const = default;
  std::string str() const { return std::to_string(dim) + "," + std::to_string(L); }
};

/* Signed distance on the unit circle, in (-1/2, 1/2]. */
inline double torus_diff(double a, double b) {
  double d = a - b;
  d -= double(int64_t(d > 0 ? d + 0.5 : d - 0.5));
  if (d <= -0.5) d += 1.0;
  if (d > 0.5) d -= 1.0;
  return d;
}

}  // namespace reconkit
