#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "reconkit/field.hpp"

namespace reconkit {

/* Radial cutoff profile: smooth, identically 1 on [0,1], identically 0 on
   [4/3, infinity), strictly decreasing in between. */
double lp_profile(double t);

/* Highest dyadic block index resolved on the grid. The top block is stored as
   the complement 1 - profile(2^-top |xi|), so the family sums to exactly 1 at
   every lattice frequency, including the corners beyond the Nyquist ball. */
inline int lp_top(const Grid& g) { return g.L - 2; }

/* Multiplier of block i at radial frequency t = |xi|; i in [-1, j_max]. */
double lp_rho(int i, int j_max, double t);

/* Dyadic frequency decomposition: block i of f, and the family of all blocks
   (vector index 0 holds block -1). Summing the family recovers f. */
Field lp_block(const Field& f, int i);
std::vector<Field> lp_blocks(const Field& f);

/* Low-pass partial sum over blocks i <= j - 2, defined for 1 <= j <= j_max.
   Computed as the single telescoped multiplier profile(2^(1-j) |xi|). */
Field s_block(const Field& f, int j);

/* Per-block sup norms m_i for i = -1 .. j_max. */
struct SpectralProfile {
  std::vector<double> m;
  double at(int i) const { return m[size_t(i + 1)]; }
  int top() const { return int(m.size()) - 2; }
};
SpectralProfile spectral_profile(const Field& f);

/* max_i 2^(alpha i) m_i over all blocks. */
double besov_norm(const Field& f, double alpha);
double besov_norm(const SpectralProfile& p, double alpha);

struct RegularityFit {
  double slope = 0.0;      // fitted Hoelder exponent
  double intercept = 0.0;  // fitted -log2 m_i at i = 0
  double residual = 0.0;   // root-mean-square fit residual
  int points = 0;          // blocks that survived the dead-block exclusion
};

/* Least-squares fit of -log2 m_i against i over blocks [lo, hi]. The window
   must lie inside [2, j_max - 1] and span at least four blocks; blocks with
   m_i < 1e-13 are excluded, and fewer than two surviving points raises
   insufficient-data. The default window is [3, j_max - 2], widened to
   [2, j_max - 1] when the grid is too small for it. */
RegularityFit estimate_regularity(const Field& f);
RegularityFit estimate_regularity(const Field& f, int lo, int hi);
RegularityFit estimate_regularity(const SpectralProfile& p, int lo, int hi);

/* Bony decomposition: the paraproduct P_f g = sum_{j>=1} S_j f Delta_j g, the
   resonant part over |i - j| <= 1, the low-frequency part f - P_1 f, and the
   commutator-type corrector P_a(P_b c) - P_{ab} c. */
Field para(const Field& f, const Field& g);
Field resonant(const Field& f, const Field& g);
Field smooth_part(const Field& f);
Field corrector(const Field& a, const Field& b, const Field& c);

/* Dense materialization of a two-variable kernel: entry (p, q) holds the
   value at (node p, node q), row-major in the first slot. */
struct DenseKernel {
  Grid grid;
  std::vector<double> values;
};

/* Two-variable kernel Lambda(y, z) = sum_n a_n(y) b_n(z), optionally also
   materialized densely. */
struct TwoVarFunction {
  std::vector<std::pair<Field, Field>> rank;
  std::optional<DenseKernel> dense;

  Grid grid() const;
  static TwoVarFunction outer(Field a, Field b);
};

/* Largest pointwise gap between the two representations, when both exist. */
double two_var_mismatch(const TwoVarFunction& lam);

/* Pointwise value Lambda(p, q) from the rank form (dense fallback), and the
   slot-2 field obtained by freezing slot 1 at node p. */
double two_var_at(const TwoVarFunction& lam, size_t p, size_t q);
Field two_var_fix_first(const TwoVarFunction& lam, size_t p);

/* Diagonal paraproduct of a two-variable kernel: block j applies the low-pass
   S_j in the first slot and Delta_j in the second, restricted to the diagonal;
   the full operator sums j = 1 .. j_max. The rank path reduces to
   sum_n P_{a_n} b_n; the dense path transforms rows and columns literally and
   is kept for cross-validation, refusing (unless forced) grids beyond L = 12
   in dimension one and all two-dimensional grids. */
Field para2_block(const TwoVarFunction& lam, int j);
Field para2_rank(const TwoVarFunction& lam);
Field para2_dense(const TwoVarFunction& lam, bool force = false);
Field para2(const TwoVarFunction& lam, bool force = false);

/* Convolution kernel of block j (the field whose Fourier coefficients are the
   block multiplier) and its r-th absolute moment integral |k_j(x)| |x|^r. */
Field lp_kernel(const Grid& g, int j);
double lp_kernel_moment(const Grid& g, int j, double r);

/* Random field with prescribed Hoelder regularity: the coefficient at xi has
   magnitude (1 + |xi|)^(-alpha - dim/2) times a lognormal factor, with uniform
   phase, drawn from a deterministic seeded stream. */
Field noise_field(const Grid& g, double alpha, uint64_t seed);

}  // namespace reconkit
