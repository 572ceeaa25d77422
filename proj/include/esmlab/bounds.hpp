#pragma once

// Decomposition of the union-excess integrand into s1 + s2 + s3, the five-way
// region split of the cube-times-coordinate space, and numeric checkers for
// every inequality the excess estimate rests on. Checkers distinguish
// "hypothesis not met" (skipped) from "inequality violated": most bounds carry
// side conditions that random sweeps frequently miss.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "esmlab/cube.hpp"
#include "esmlab/esm.hpp"

namespace esmlab::bounds {

// Standing hypotheses on the region thresholds.
struct RegionKappas {
  double k0 = 0.0, k1 = 0.0, k2 = 0.0;
  bool valid() const { return k0 > 0.0 && k0 < 0.25 && k1 > 0.0 && k1 <= 0.125 && k2 > 0.0 && k2 <= k1 / 8.0; }
};

// kappa0 = kappa1 = (-log mu)^{-1/3}, kappa2 = (-log mu)^{-1}; admissible
// only for very small mu (the asymptotic regime).
RegionKappas asymptotic_kappas(double mu_u);

// Threshold choice used by the sweeps at desk scale.
inline constexpr RegionKappas kSweepKappas{0.2, 0.125, 0.015625};

struct DecompositionTerms {
  double s1 = 0.0;  // joint increment minus U's increment (nonnegative)
  double s2 = 0.0;  // eps_V (h(eps0U/epsU) - h(eps0V/epsV))
  double s3 = 0.0;  // remainder: (Delta_V - ratio Delta_U) - s2
  double r = 0.0;   // max{0, Delta_V - ratio Delta_U}
  int region = 1;   // 1..5
  double kappa0 = 0.0, kappa1 = 0.0, kappa2 = 0.0;
};

// Entropy increment of the three-valued variable (in V / in U minus V /
// outside U) conditioned on the slice; computed from the explicit three-atom
// distribution. Requires V inside U.
double joint_delta(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord,
                   std::uint32_t w, int i);

DecompositionTerms s_terms(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord,
                           std::uint32_t w, int i, const RegionKappas& kappas);

enum class CheckOutcome { kPassed, kViolated, kSkipped };

struct HquadResult {
  bool lower_ok = false, upper_ok = false;
};
// 2 (x-1/2)^2 <= |h(x) - h(1/2)| <= 8 (x-1/2)^2.
HquadResult check_hquad(double x);

CheckOutcome check_s1_lower(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord,
                            std::uint32_t w, int i, double kappa);
CheckOutcome check_delta_approx(const CubeSubset& u, const LinearOrder& ord, std::uint32_t w, int i);
CheckOutcome check_s3(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord,
                      std::uint32_t w, int i);
CheckOutcome check_s2(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord,
                      std::uint32_t w, int i, double kappa1, double kappa2);

struct RegionIntegrals {
  double integral[5] = {0, 0, 0, 0, 0};  // I_1..I_5 (index d-1)
  double bound[5] = {0, 0, 0, 0, 0};     // per-region upper bounds at the chosen kappas
  double excess = 0.0;                   // union excess accumulated in the same pass
  RegionKappas kappas;
};

// Splits the excess integral over the five regions; throws when the kappa
// hypotheses fail or V is not contained in U.
RegionIntegrals region_integrals(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord,
                                 const RegionKappas& kappas);
// Same with the asymptotic kappa choice derived from mu(U).
RegionIntegrals region_integrals(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord);

// ---- sweep drivers ----

struct LemmaCounts {
  std::uint64_t checked = 0;
  std::uint64_t skipped = 0;
  std::uint64_t violated = 0;
  double max_slack = -1e300;  // max of (lhs - rhs) over checks; <= tolerance when clean
};

struct SweepReport {
  int n = 0;
  std::uint64_t triples = 0;
  bool exhaustive = false;
  std::map<std::string, LemmaCounts> lemmas;

  bool clean() const;
  std::uint64_t total_violations() const;
};

// All U with 1 <= |U| <= 2^{n-1} points capped at `max_u_size`, all V inside
// U, all n! orders. Intended for n = 4 with max_u_size = 8.
SweepReport sweep_exhaustive(int n, int max_u_size, int threads);

// Random (U, V, order) triples; densities cycle over 2^{-2}..2^{-(n-2)}.
SweepReport sweep_random(int n, std::uint64_t triples, std::uint64_t seed, int threads);

struct RatePoint {
  double mu = 0.0;
  double excess_mean = 0.0;  // mean of excess / mass(U)
  double excess_sd = 0.0;
  double bound = 0.0;        // fitted C * log|log mu| / |log mu|^{1/3}
};

struct RateTable {
  std::vector<RatePoint> rows;
  double c_fit = 0.0;
};

// Random U at each density, V an independent half-thinning, fresh order per
// trial; reports the relative union excess and fits the rate constant.
RateTable excess_rate_experiment(int n, const std::vector<double>& densities, int trials,
                                 std::uint64_t seed, int threads);

// ---- projective metric ----

// d([u],[v]) = ||u ^ v|| / (||u|| ||v||); throws on zero vectors.
double proj_distance(const std::vector<double>& u, const std::vector<double>& v);

struct ProjReport {
  double distance = 0.0;        // full-dimensional projective distance
  double max_pair_distance = 0.0;
  bool pair_bound_ok = false;   // distance <= (n-1) max over coordinate pairs
  double lambda = 0.0;          // orthogonal-projection coefficient
  double ratio = 0.0;           // ||u - lambda v||_inf / ||u||_inf
  bool norm_lower_ok = false;   // ratio >= distance / n - tol
  bool norm_upper_ok = false;   // ratio <= n distance + tol
  bool ok() const { return pair_bound_ok && norm_lower_ok && norm_upper_ok; }
};

ProjReport check_proj_lemmas(const std::vector<double>& u, const std::vector<double>& v);

struct ProjSweep {
  std::uint64_t checked = 0;
  std::uint64_t violated = 0;
  double max_ratio_over_bound = 0.0;
};

// Random positive vector pairs across the given dimensions.
ProjSweep proj_sweep(int dim_lo, int dim_hi, std::uint64_t draws, std::uint64_t seed);

}  // namespace esmlab::bounds
