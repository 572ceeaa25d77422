#pragma once

// The entropy support field of a cube subset: conditional slice densities,
// per-coordinate information increments, and the height function
// J(w,i) = 1_U(w) * Delta_U(w,i) / eps_U(w,i) whose mass reproduces the
// subset entropy for every revelation order.
//
// Fibers of the support set are intervals [0, J(w,i)), so unions,
// intersections and symmetric differences of two fields reduce to pointwise
// max / min / absolute difference of heights.

#include <cstdint>
#include <functional>
#include <vector>

#include "esmlab/cube.hpp"

namespace esmlab {

struct ConditionalDensities {
  double eps = 0.0;   // relative density of U in the slice fixed by w's revealed prefix
  double eps0 = 0.0;  // half the density of the sub-slice with coordinate i = 0
  double eps1 = 0.0;  // likewise with coordinate i = 1; eps = eps0 + eps1
};

ConditionalDensities conditional_densities(const CubeSubset& u, const LinearOrder& ord,
                                           std::uint32_t w, int i);

// Information gained about U by revealing coordinate i after w's prefix:
// h(eps) - h(2 eps0)/2 - h(2 eps1)/2. Nonnegative, at most log 2.
double delta(const CubeSubset& u, const LinearOrder& ord, std::uint32_t w, int i);

// Same quantity through the conditional-entropy-of-Z_i route
// eps (h(1/2) - h(eps0/eps)) + (1-eps)(h(1/2) - h((1/2-eps0)/(1-eps))).
double delta_alternate(const CubeSubset& u, const LinearOrder& ord, std::uint32_t w, int i);
double delta_alternate(const ConditionalDensities& d);

// Materialized height field (kept for n <= 16; larger cubes go through the
// streaming routines below).
class EsmField {
 public:
  EsmField(int n, LinearOrder order, double source_measure, std::vector<double> heights);

  int n() const { return n_; }
  const LinearOrder& order() const { return order_; }
  double source_measure() const { return source_measure_; }
  double at(std::uint32_t w, int i) const {
    return heights_[(static_cast<std::size_t>(i) << n_) | w];
  }
  const std::vector<double>& heights() const { return heights_; }

 private:
  int n_ = 0;
  LinearOrder order_;
  double source_measure_ = 0.0;
  std::vector<double> heights_;  // plane-per-coordinate layout
};

inline constexpr int kMaxFieldCoords = 16;

EsmField esm_field(const CubeSubset& u, const LinearOrder& ord);

// 2^-n sum of heights; equals h(mu(U)) for fields built by esm_field.
double field_mass(const EsmField& f);
// Streaming variant, valid for any n within the cube cap.
double field_mass(const CubeSubset& u, const LinearOrder& ord);

struct PairMasses {
  double intersection = 0.0;
  double union_ = 0.0;
  double symdiff = 0.0;
};

// Throws std::invalid_argument when n or order differ.
PairMasses pair_masses(const EsmField& fu, const EsmField& fv);
PairMasses pair_masses(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord);

// m(field(U) union field(V)) - m(field(U)) for V inside U (checked), computed
// directly from the slice integrand max{0, Delta_V - (eps_V/eps_U) Delta_U}.
double union_excess(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord);

// Max over (w,i) of |J_{sigma U, sigma ord}(sigma w, sigma i) - J_{U,ord}(w,i)|.
double check_equivariance(const CubeSubset& u, const LinearOrder& ord, const CoordPermutation& sigma);

// ---- slice-level iteration (shared with the inequality checkers) ----

// Per-level view of the slice count tables. Level p has 2^p slices of
// 2^{n-p} points each; slice ids pack the revealed bits in revelation order.
struct LevelSlices {
  int level = 0;
  std::uint64_t slice_points = 0;
  const std::uint32_t* cnt_u = nullptr;   // members of U per slice
  const std::uint32_t* cnt_u0 = nullptr;  // members of U with revealed coordinate = 0
  const std::uint32_t* cnt_v = nullptr;   // null when no second subset
  const std::uint32_t* cnt_v0 = nullptr;
};

void for_each_level(const CubeSubset& u, const CubeSubset* v, const LinearOrder& ord,
                    const std::function<void(const LevelSlices&)>& f);

inline double slice_eps(std::uint32_t cnt, std::uint64_t slice_points) {
  return static_cast<double>(cnt) / static_cast<double>(slice_points);
}

// Delta of one slice from its member counts.
double slice_delta(std::uint32_t cnt, std::uint32_t cnt0, std::uint64_t slice_points);

}  // namespace esmlab
