#pragma once

// Finite unimodular random subsets and their cylinder fingerprints: the
// uniform rooted translates of a finite set, the mass-transport balance
// check, empirical cylinder tables for factor-of-iid rules, and the
// truncated weak-* distance between tables.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "esmlab/fiid.hpp"
#include "esmlab/groups.hpp"

namespace esmlab::urs {

using fiid::LocalRule;
using groups::GroupElement;
using groups::GroupSpec;

// Finite rooted set: sorted canonical elements, identity always present.
using RootedAtom = std::vector<GroupElement>;

RootedAtom rerooted(const RootedAtom& atom, const GroupElement& gamma);  // gamma^-1 * atom
std::string atom_key(const RootedAtom& atom);

struct RootedSetDistribution {
  std::vector<RootedAtom> atoms;
  std::vector<double> probabilities;  // sums to 1
  bool exact = true;
  std::uint64_t samples = 0;
};

// Uniform rooted translate gamma^-1 F over gamma in F; coincident translates
// merge with added mass. Throws on empty F.
RootedSetDistribution finite_urs(const std::vector<GroupElement>& f);

// E[1/|E|] — exactly 1/|F| for finite_urs(F).
double mean_inverse_size(const RootedSetDistribution& dist);

using TestFunction = std::function<double(const RootedAtom&, const GroupElement&)>;

// |E sum_{g in E} f(E,g) - E sum_{g in E} f(g^-1 E, g^-1)|.
double mtp_check(const RootedSetDistribution& dist, const TestFunction& f);

// Ten bounded test functions used by the unimodularity battery.
std::vector<TestFunction> mtp_battery(const GroupSpec& spec);

struct CylinderEntry {
  std::vector<GroupElement> pattern;
  double p = 0.0;
  std::uint64_t count = 0;
};

struct CylinderTable {
  GroupSpec spec;
  int radius = 0;
  bool exact = true;
  std::uint64_t samples = 0;
  double acceptance_rate = 1.0;
  std::map<std::string, CylinderEntry> entries;  // key -> P(pattern contained in E)
};

enum class ConditioningMode {
  kRejection,      // resample until the root lands in E; reports acceptance
  kExactPlanting,  // zoo only: exact conditional law of the covering plants
};

// Empirical P(F contained in E | root in E) for every rooted pattern of size
// <= 3 inside ball(radius), plus the most frequent observed window sets.
CylinderTable cylinder_probabilities(const GroupSpec& spec, const LocalRule& rule, int radius,
                                     std::uint64_t n_samples, std::uint64_t seed,
                                     ConditioningMode mode, int threads);

// Exact table of a finite-support distribution.
CylinderTable cylinder_table_exact(const GroupSpec& spec, const RootedSetDistribution& dist,
                                   int radius);

// Max over patterns tracked in both tables of |p1 - p2|; throws on radius or
// group mismatch.
double weak_star_distance(const CylinderTable& t1, const CylinderTable& t2);

struct LimitRow {
  double q = 0.0;
  double distance = 0.0;
  double acceptance = 1.0;
};

struct LimitCheck {
  std::vector<LimitRow> rows;
  bool trend_ok = false;  // decreasing with at most one inversion
  bool final_ok = false;  // last distance under the threshold
  double threshold = 0.0;
};

// Distance between the zoo at each intensity and the finite unimodular
// distribution of the pattern itself.
LimitCheck fiid_thinning_limit_check(const GroupSpec& spec,
                                     const std::vector<GroupElement>& pattern,
                                     const std::vector<double>& intensities, int radius,
                                     std::uint64_t samples, std::uint64_t seed, double threshold,
                                     int threads);

}  // namespace esmlab::urs
