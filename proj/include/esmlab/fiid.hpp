#pragma once

// Factor-of-iid subsets of Cayley balls: finite-radius local rules evaluated
// on counter-based labels keyed by group elements (so membership agrees
// across window sizes and recenterings), density estimation, connected
// components, and the cut procedures for hyperfiniteness experiments.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "esmlab/groups.hpp"

namespace esmlab::fiid {

using groups::CayleyBall;
using groups::GroupElement;
using groups::GroupSpec;

struct LocalRule {
  enum class Kind { kBernoulli, kPoissonZoo, kMinLabel };

  Kind kind = Kind::kBernoulli;
  double p = 0.0;                                  // bernoulli keep probability
  double q = 0.0;                                  // zoo seeding intensity
  int window = 0;                                  // min-label comparison radius
  std::vector<std::vector<GroupElement>> patterns; // zoo patterns, each containing identity

  static LocalRule bernoulli(double p);
  static LocalRule poisson_zoo(std::vector<std::vector<GroupElement>> patterns, double q);
  static LocalRule min_label(int window);
  // "bernoulli:p=0.3", "zoo:q=1e-3,pat=ball1", "zoo:q=1e-3,pat=ball1|ball2",
  // "minlabel:r=2". Pattern names: ballK or e.
  static LocalRule parse(const GroupSpec& spec, const std::string& text);

  int radius() const;
  std::string to_string() const;
};

std::vector<GroupElement> ball_pattern(const GroupSpec& spec, int radius);

// Test-only hook: per-element forced zoo seed state.
struct ZooForcing {
  std::vector<GroupElement> elements;
  std::vector<std::int8_t> seeded;
  std::vector<int> pattern_index;  // meaningful when seeded
};

// Evaluates one rule against the label world of a given seed. Pure queries;
// shareable across threads.
class RuleEvaluator {
 public:
  RuleEvaluator(GroupSpec spec, LocalRule rule);

  const LocalRule& rule() const { return rule_; }
  const GroupSpec& spec() const { return spec_; }

  bool member(std::uint64_t world_seed, const GroupElement& v,
              const ZooForcing* forcing = nullptr) const;

  // Zoo only: exact sample of the candidate-cover states conditioned on the
  // root being covered; the returned forcing replaces rejection sampling.
  ZooForcing draw_conditioned_cover(std::uint64_t world_seed, std::uint64_t draw_key) const;
  // Probability that the root belongs to a zoo set (for acceptance-rate
  // bookkeeping of the exact-conditioning path).
  double zoo_root_density() const;

 private:
  bool zoo_plants_here(std::uint64_t world_seed, const GroupElement& u, int* pattern_out,
                       const ZooForcing* forcing) const;

  GroupSpec spec_;
  LocalRule rule_;
  std::vector<GroupElement> candidates_;       // distinct phi^-1 over all patterns
  std::vector<std::vector<char>> covers_;      // candidates_ x patterns: phi in pattern j
  std::vector<GroupElement> window_elements_;  // min-label comparison offsets
};

// Labels and membership over a Cayley ball window. Membership is defined
// only for vertices within distance R - rule.radius(); outside it is -1 and
// never read by the statistics.
struct BallConfig {
  std::shared_ptr<const CayleyBall> ball;
  std::shared_ptr<const RuleEvaluator> evaluator;
  GroupElement center;
  std::uint64_t seed = 0;
  int valid_radius = 0;
  std::vector<std::uint64_t> labels;  // label word 0 of center * vertex
  std::vector<std::int8_t> membership;  // -1 undefined / 0 / 1

  bool defined(std::size_t idx) const { return membership[idx] >= 0; }
  bool in_set(std::size_t idx) const { return membership[idx] == 1; }
};

BallConfig sample_config(const GroupSpec& spec, const LocalRule& rule, int radius,
                         std::uint64_t seed);
BallConfig sample_config(std::shared_ptr<const CayleyBall> ball,
                         std::shared_ptr<const RuleEvaluator> evaluator, std::uint64_t seed,
                         const GroupElement& center);

struct ComponentStats {
  std::vector<int> interior_sizes;  // components staying clear of the window shell, descending
  std::vector<int> boundary_sizes;  // components touching the outermost defined layer
};

// Connected components of E within the defined window under S-adjacency.
ComponentStats components(const BallConfig& config);

struct CutResult {
  int k_target = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> state;  // 0 free 1 cluster 2 cut 3 outside
  std::uint64_t cut_in_window = 0;
  std::uint64_t set_in_window = 0;
  double cut_fraction = 0.0;  // on the statistics window; 0 when the window is empty
  int k_emp = 0;              // largest component of E minus C (whole defined window)
};

// Label-order cascade carving: clusters grow by BFS inside E up to k_target
// vertices, the S-boundary of each finished cluster is cut, and the next
// cluster seeds at the least-label free vertex adjacent to the fresh cut, so
// consumed components are carved flush. Components of E minus C never exceed
// k_target (checked).
CutResult cut_random_carving(const BallConfig& config, int k_target, std::uint64_t seed);

// Each index kept independently with probability 1 - exp(4 log(eps) w).
std::vector<std::size_t> exponential_selection(const std::vector<double>& weights, double eps,
                                               std::uint64_t seed);
double selection_probability(double weight, double eps);

struct PairModelBound {
  double epsilon_prime = 0.0;
  bool vacuous = false;  // bound of 1 or more carries no information
};
PairModelBound pairmodel_bound(int generating_set_size, double eps);

struct DensityEstimate {
  double p_hat = 0.0;
  double ci95 = 0.0;
  std::uint64_t samples = 0;
};

DensityEstimate density_estimate(const GroupSpec& spec, const LocalRule& rule,
                                 std::uint64_t n_samples, std::uint64_t seed, int threads);

struct CurveRow {
  double density_param = 0.0;   // the rule's p or q
  double mean_density = 0.0;    // observed |E| / window size
  double mean_cut_fraction = 0.0;
  double mean_k_emp = 0.0;
};

// One row per rule; `trials` fresh configs each, trial-parallel.
std::vector<CurveRow> hyperfiniteness_curve(const GroupSpec& spec,
                                            const std::vector<LocalRule>& rules, int k_target,
                                            int radius, int trials, std::uint64_t seed,
                                            int threads);

}  // namespace esmlab::fiid
