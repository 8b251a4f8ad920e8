#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reconkit/algebra.hpp"
#include "reconkit/field.hpp"
#include "reconkit/harmonic.hpp"
#include "reconkit/partition.hpp"
#include "reconkit/structure.hpp"

namespace reconkit {

/* --- characters ---------------------------------------------------------- */

/* A grid-sampled family x -> g_x of algebra characters on the Plus space.
   Values are stored on the generators (chart coordinates and decorated
   integration symbols) and extended multiplicatively to monomials; the
   inverse character is the composition with the symbolic antipode, so
   g_x * g_x^{-1} = delta on the nose up to rounding.

   A CharacterField is mutable while generators are being installed and
   immutable after finalize(); every evaluation method requires a finalized
   object and is then pure and thread-safe. */
class CharacterField {
 public:
  CharacterField() = default;
  CharacterField(ConcreteStructure s, Grid grid);

  const ConcreteStructure& structure() const { return s_; }
  const Grid& grid() const { return grid_; }

  /* Install the value field of one Plus-space generator. Rejects ids that are
     not generators, grids that disagree, and calls after finalize(). */
  void set_generator(SymbolId id, Field values);
  bool generator_set(SymbolId id) const;

  /* Extends the generator values to every Plus-space symbol (unit -> 1,
     products -> pointwise products) and computes the inverse-character values
     through the antipode table. Requires every generator to be installed and
     every value to be finite. */
  void finalize();
  bool finalized() const { return finalized_; }

  /* Pointwise values of g on a Plus symbol or a rational combination. */
  const Field& eval(SymbolId tau) const;
  Field eval(const Vec& v) const;

  /* Pointwise values of the inverse character g^{-1} = g after the antipode. */
  const Field& inv_eval(SymbolId tau) const;
  Field inv_eval(const Vec& v) const;

  /* Two-point character g_yx := g_y * g_x^{-1} evaluated through the algebra
     coproduct row of tau; py indexes the first (y) leg and px the second. */
  double g_yx_at(SymbolId tau, size_t py, size_t px) const;
  double g_yx_at(const Vec& v, size_t py, size_t px) const;

  /* Rank form of the two-point character: slot 1 carries the g_x^{-1} leg and
     slot 2 the g_y leg, so two_var_at(k, px, py) = g_yx_at(tau, py, px). */
  TwoVarFunction g_two_point(SymbolId tau) const;

 private:
  const Field& value(SymbolId id, const std::vector<Field>& table, const char* what) const;

  ConcreteStructure s_;
  Grid grid_;
  std::vector<std::optional<Field>> gen_;  // by symbol id; generators only
  std::vector<Field> val_;                 // finalized g values, by Plus symbol id
  std::vector<Field> inv_;                 // finalized inverse values
  bool finalized_ = false;
};

/* --- models --------------------------------------------------------------- */

/* A pair (g, Pi): the character field plus one realization field per basis
   symbol of the carrier space. Base-space models realize the comodule; the
   Plus-space variant (space() == Space::Plus) realizes the character algebra
   over itself, with the algebra coproduct playing the comodule role. */
class Model {
 public:
  Model() = default;
  Model(CharacterField g, std::map<SymbolId, Field> pi, std::string provenance,
        Space space = Space::Base);

  const ConcreteStructure& structure() const { return g_.structure(); }
  const Grid& grid() const { return g_.grid(); }
  const CharacterField& g() const { return g_; }
  Space space() const { return space_; }
  const std::string& provenance() const { return provenance_; }

  /* Realization of one carrier basis symbol, and its linear extension. */
  const Field& pi(SymbolId tau) const;
  Field pi(const Vec& v) const;
  const std::map<SymbolId, Field>& pi_map() const { return pi_; }

  /* Carrier basis ids, in structure order. */
  const std::vector<SymbolId>& carrier() const;

  bool validated() const { return validated_; }
  void mark_validated() { validated_ = true; }

 private:
  CharacterField g_;
  std::map<SymbolId, Field> pi_;
  std::string provenance_;
  Space space_ = Space::Base;
  bool validated_ = false;
};

/* Recentred realization Pi_x^g tau = (Pi tensor g_x^{-1}) Delta tau.
   pi_x_field fixes the base point at grid node px and returns the field of
   the running point; pi_x_kernel returns the two-variable rank form with the
   base point in slot 1 and the running point in slot 2. */
Field pi_x_field(const Model& m, SymbolId tau, size_t px);
Field pi_x_field(const Model& m, const Vec& v, size_t px);
TwoVarFunction pi_x_kernel(const Model& m, SymbolId tau);

/* Finite chain expansion of Pi_x^g tau over strict sub-symbols: the chain of
   length n contributes (-1)^n g_x(tau/s_1) ... g_x(s_{n-1}/s_n) Pi s_n, with
   the empty chain contributing Pi tau. Slot 1 carries the x-dependent chain
   coefficients, slot 2 the realizations; evaluating slot 1 at any px
   reproduces pi_x_field(m, tau, px). */
TwoVarFunction pi_x_expansion(const Model& m, SymbolId tau);

/* Finite chain expansion of (x, y) -> g_yx(tau/sigma) in terms of g alone:
   the leading term is g_y(tau/sigma) - g_x(tau/sigma) and the chain of length
   n through sigma < s_n < ... < s_1 < tau contributes
   (-1)^n g_x(tau/s_1) ... g_x(s_{n-1}/s_n) (g_y - g_x)(s_n/sigma).
   Slot 1 is the x leg, slot 2 the y leg; sigma = tau returns the constant 1.
   Requires sigma <= tau in the sub-symbol order. */
TwoVarFunction g_yx_expansion(const CharacterField& g, SymbolId tau, SymbolId sigma);

/* --- mollifiers ------------------------------------------------------------ */

/* A fixed dyadic test-function family: one radial bump scaled to unit mass
   plus its first partial derivative per axis, at scales lambda = 2^{-j} for
   j in [1, top - 2] with top the finest resolved dyadic block. Kernels are
   stored centred at node 0 and carry the physical lambda^{-d} scaling;
   cr_norm records each member's sampled Hoelder-r norm so that pairings can
   be read against unit-norm test functions. */
struct MollifierFamily {
  Grid grid;
  double r = 2.0;
  std::vector<int> levels;                   // j, scale 2^{-j}
  std::vector<std::vector<Field>> kernels;   // [member][level]
  std::vector<double> cr_norm;               // [member]

  int members() const { return int(kernels.size()); }
};

/* Builds the family on a grid; r is the smoothness order used for the norm
   normalization (0 < r <= 2; derivatives up to order 2 are sampled). */
MollifierFamily build_mollifiers(const Grid& g, double r = 2.0);

/* Pairing <f, phi_x^lambda> / ||phi||_{C^r} at base node px, by grid
   quadrature. member selects the bump (0) or an axis derivative (1..dim). */
double mollifier_pairing(const MollifierFamily& mf, int member, int level_index,
                         const Field& f, size_t px);

/* All-base-points pairing field x -> <f, phi_x^lambda> / ||phi||_{C^r},
   computed in one spectral pass. */
Field mollifier_pairing_field(const MollifierFamily& mf, int member, int level_index,
                              const Field& f);

/* --- model checks ---------------------------------------------------------- */

struct TransitionReport {
  bool ok = true;
  double worst_transition = 0.0;  // recentring transition residual, relative
  double worst_recovery = 0.0;    // recovery of Pi from Pi_x^g and g_x
  double worst_cocycle = 0.0;     // two-step against one-step recentring
  double worst_poly = 0.0;        // polynomial-sector coherence, absolute
  std::vector<CheckItem> failures;
  std::string summary() const;
};

struct TransitionOptions {
  int pairs = 10;
  uint64_t seed = 77;
  double tol = 1e-9;            // transition and cocycle residuals
  double recovery_tol = 1e-10;  // recovery residual
  double poly_tol = 1e-12;      // polynomial-sector coherence
};

/* Verifies, at sampled grid pairs and for every carrier symbol: the
   transition identity (recentring at y equals recentring at x composed with
   the two-point recentring operator), the recovery of Pi from Pi_x^g and
   g_x, the cocycle property of the recentring operators over sampled
   triples, and — for Base-space models — that the polynomial sector of Pi
   matches the corresponding coordinate monomials of g pointwise. */
TransitionReport check_transition(const Model& m, const TransitionOptions& opt = {});

struct ScalingRow {
  SymbolId id = kNoSymbol;
  std::string name;
  double declared = 0.0;   // homogeneity
  double estimated = 0.0;  // regression slope
  double shortfall = 0.0;  // declared - estimated, clipped below at 0
  double sup_ratio = 0.0;  // sup of |value| / separation^declared
  int points = 0;          // regression points that survived the dead cut
  bool flagged = false;
};

struct ModelNormReport {
  double g_sup = 0.0;        // sup over sampled x and plus symbols of |g_x|
  double g_ratio_sup = 0.0;  // sup |g_yx(tau)| / |y-x|^{|tau|}
  double pi_ratio_sup = 0.0; // sup pairing / lambda^{|sigma|}
  std::vector<ScalingRow> g_scaling;
  std::vector<ScalingRow> pi_scaling;
  int coarsest_level = 0;    // dyadic window actually used
  int finest_level = 0;
  bool ok = true;
  std::string summary() const;
};

struct ModelNormOptions {
  int base_points = 64;
  uint64_t seed = 2026;
  double slack = 0.2;      // tolerated exponent shortfall
  int coarsest_level = 6;  // locality radius 2^-coarsest: chart coordinates
                           // scale only below the taper width of the
                           // partition of unity (1/16), so coarser
                           // separations saturate and flatten the regression
  int finest_level = -1;   // -1: finest dyadic level the mollifiers carry;
                           // callers with mollified data pass the scale at
                           // which their fields stop resolving.
};

/* Sampled model norms: sup and dyadic-scaling estimates for the two-point
   character on every Plus basis symbol, and mollifier-pairing scaling of
   Pi_x^g sigma on every carrier symbol, regressed over the dyadic window.
   Rows whose measured exponent falls short of the declared homogeneity by
   more than the slack are flagged. */
ModelNormReport model_norms(const Model& m, const MollifierFamily& mf,
                            const ModelNormOptions& opt = {});

/* --- canonical models ------------------------------------------------------ */

/* Installs the polynomial sector shared by every concrete model: coordinate
   generator values from the partition's chart coordinates, and monomial
   realizations for the bounded-polynomial carrier symbols (the unit included).
   Leaves non-polynomial symbols untouched. */
void install_polynomial_sector(CharacterField& g, std::map<SymbolId, Field>& pi,
                               const PartitionOfUnity& pu);

/* The canonical model of a purely polynomial structure: g_x on a coordinate
   monomial and (Pi monomial)(x) alike evaluate the chart coordinates at x. */
Model canonical_polynomial_model(const ConcreteStructure& s, const PartitionOfUnity& pu);

/* The canonical model a character field induces on the Plus space over
   itself: (Pi tau)(x) := g_x(tau). */
Model canonical_plus_model(const CharacterField& g);

/* --- modelled distributions ------------------------------------------------ */

/* A T-valued (or T+-valued) function of the grid point, stored as one
   coefficient field per carrier basis symbol of homogeneity below gamma;
   missing symbols mean zero coefficients. */
struct ModelledDistribution {
  Space space = Space::Base;
  double gamma = 0.0;
  Grid grid;
  std::map<SymbolId, Field> coeff;

  Field coefficient(SymbolId id) const;  // zero field when absent
  bool empty() const { return coeff.empty(); }
};

/* The tautological modelled distribution of a carrier symbol tau: the sum of
   g_x(tau/sigma) sigma over strict sub-symbols, declared at gamma = |tau|. */
ModelledDistribution h_tau(const CharacterField& g, SymbolId tau);

/* The quotient of a Base-space modelled distribution by a carrier symbol:
   sum of f^sigma (sigma/tau) over sigma >= tau, re-indexed over the Plus
   basis and declared at gamma - |tau|. */
ModelledDistribution md_quotient(const ConcreteStructure& s, const ModelledDistribution& f,
                                 SymbolId tau);

/* The patched Taylor lift of a smooth function at order r: coefficient
   d^k(phi_e f) / k! on the monomial symbol of chart e and exponent k, the
   order-zero parts accumulated on the unit symbol. Requires the structure to
   carry the monomials of every order below r. */
ModelledDistribution polynomial_lift(const ConcreteStructure& s, const PartitionOfUnity& pu,
                                     const Field& f, double r);

struct GradeRow {
  double grade = 0.0;
  double static_sup = 0.0;   // sup over x of the grade's coefficient norm
  double sup_ratio = 0.0;    // sup increment-norm / |y-x|^{gamma - grade}
  double estimated = 0.0;    // regression slope of the increment norm
  double shortfall = 0.0;    // (gamma - grade) - estimated, clipped at 0
  int points = 0;
  bool flagged = false;
};

struct DGammaReport {
  double static_bound = 0.0;   // max over grades of static_sup
  double norm_estimate = 0.0;  // max over grades of sup_ratio
  std::vector<GradeRow> grades;
  bool ok = true;
  std::string summary() const;
};

struct PairSampler {
  int random_pairs = 128;
  int dyadic_base_points = 64;  // enough strata to hit the steep taper
                                // regions of every chart at every level
  int coarsest_level = 6;  // locality radius 2^-coarsest; all sampled pair
                           // separations stay below it, because chart
                           // coordinates saturate beyond the taper width of
                           // the partition of unity (1/16)
  int finest_level = -1;   // -1: two grid cells above the lattice spacing;
                           // increments are pointwise, no mollifier involved
  uint64_t seed = 424242;
  double slack = 0.2;
};

/* Sampled Holder-type norms of a modelled distribution: the increment
   f(y) - ghat_yx f(x) is evaluated grade by grade through the coproduct rows,
   its per-grade sup ratios against |y-x|^{gamma-grade} are recorded, and the
   dyadic-separation subset feeds a per-grade decay regression. */
DGammaReport d_gamma_norms(const ModelledDistribution& f, const CharacterField& g,
                           const PairSampler& sampler = {});

/* --- persistence ------------------------------------------------------------ */

/* Writes prefix + ".json" (header: structure hash, carrier space, symbol and
   generator names, provenance) and prefix + ".rkf" (realization fields then
   generator fields). Atomic per file; byte-identical for identical models. */
void save_model(const Model& m, const std::string& prefix);

/* Rebuilds a model against the structure that produced it; the stored
   structure hash and grid must match. */
Model load_model(const std::string& prefix, const ConcreteStructure& s);

}  // namespace reconkit
