#include "esmlab/fiid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <queue>
#include <stdexcept>

#include "esmlab/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace esmlab::fiid {

namespace {

int resolve_threads(int threads) {
#ifdef _OPENMP
  return threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  return 1;
#endif
}

constexpr std::uint64_t kLabelTag = 0x6c61ull;
constexpr std::uint64_t kCarveTag = 0x6376ull;
constexpr std::uint64_t kCondTag = 0x636full;

std::uint64_t element_label(std::uint64_t world_seed, const GroupElement& g, std::uint64_t word) {
  return Rng(key_of({world_seed, kLabelTag, g.hash()})).word(word);
}

int pattern_count(const LocalRule& r) { return static_cast<int>(r.patterns.size()); }

// Bounded draw from the element's label stream, deterministic per element.
int bounded_word(std::uint64_t world_seed, const GroupElement& g, std::uint64_t first_word,
                 int bound) {
  if (bound <= 1) return 0;
  Rng stream(key_of({world_seed, kLabelTag, g.hash()}));
  const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % static_cast<std::uint64_t>(bound);
  for (std::uint64_t w = first_word;; ++w) {
    const std::uint64_t x = stream.word(w);
    if (x < limit) return static_cast<int>(x % static_cast<std::uint64_t>(bound));
  }
}

}  // namespace

LocalRule LocalRule::bernoulli(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("bernoulli: p outside [0,1]");
  LocalRule r;
  r.kind = Kind::kBernoulli;
  r.p = p;
  return r;
}

LocalRule LocalRule::poisson_zoo(std::vector<std::vector<GroupElement>> patterns, double q) {
  if (patterns.empty()) throw std::invalid_argument("poisson_zoo: need at least one pattern");
  if (q <= 0.0 || q >= 1.0) throw std::invalid_argument("poisson_zoo: intensity must be in (0,1)");
  for (const auto& pat : patterns) {
    if (pat.empty()) throw std::invalid_argument("poisson_zoo: empty pattern");
    bool has_identity = false;
    for (const auto& g : pat) has_identity = has_identity || g.is_identity();
    if (!has_identity) throw std::invalid_argument("poisson_zoo: every pattern must contain the identity");
  }
  LocalRule r;
  r.kind = Kind::kPoissonZoo;
  r.q = q;
  r.patterns = std::move(patterns);
  return r;
}

LocalRule LocalRule::min_label(int window) {
  if (window < 0) throw std::invalid_argument("min_label: negative window");
  LocalRule r;
  r.kind = Kind::kMinLabel;
  r.window = window;
  return r;
}

int LocalRule::radius() const {
  switch (kind) {
    case Kind::kBernoulli:
      return 0;
    case Kind::kMinLabel:
      return window;
    case Kind::kPoissonZoo: {
      int r = 0;
      for (const auto& pat : patterns)
        for (const auto& g : pat) r = std::max(r, g.word_length());
      return r;
    }
  }
  return 0;
}

std::string LocalRule::to_string() const {
  char buf[64];
  switch (kind) {
    case Kind::kBernoulli:
      std::snprintf(buf, sizeof buf, "bernoulli:p=%.9g", p);
      return buf;
    case Kind::kMinLabel:
      std::snprintf(buf, sizeof buf, "minlabel:r=%d", window);
      return buf;
    case Kind::kPoissonZoo: {
      std::snprintf(buf, sizeof buf, "zoo:q=%.9g,pats=%d,r=%d", q, pattern_count(*this), radius());
      return buf;
    }
  }
  return "?";
}

std::vector<GroupElement> ball_pattern(const GroupSpec& spec, int radius) {
  const CayleyBall ball(spec, radius);
  std::vector<GroupElement> out;
  out.reserve(ball.size());
  for (std::size_t k = 0; k < ball.size(); ++k) out.push_back(ball.vertex(k));
  return out;
}

LocalRule LocalRule::parse(const GroupSpec& spec, const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon == std::string::npos ? text.size() : colon);
  double p = -1.0, q = -1.0;
  int window = -1;
  std::vector<std::vector<GroupElement>> patterns;
  if (colon != std::string::npos) {
    std::size_t pos = colon + 1;
    while (pos < text.size()) {
      std::size_t comma = text.find(',', pos);
      if (comma == std::string::npos) comma = text.size();
      const std::string item = text.substr(pos, comma - pos);
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("rule: expected key=value in '" + item + "'");
      const std::string key = item.substr(0, eq);
      const std::string val = item.substr(eq + 1);
      if (key == "p") p = std::atof(val.c_str());
      else if (key == "q") q = std::atof(val.c_str());
      else if (key == "r") window = std::atoi(val.c_str());
      else if (key == "pat") {
        std::size_t vpos = 0;
        while (vpos < val.size()) {
          std::size_t bar = val.find('|', vpos);
          if (bar == std::string::npos) bar = val.size();
          const std::string name = val.substr(vpos, bar - vpos);
          if (name == "e") patterns.push_back({GroupElement::identity(spec)});
          else if (name.rfind("ball", 0) == 0)
            patterns.push_back(ball_pattern(spec, std::atoi(name.c_str() + 4)));
          else throw std::invalid_argument("rule: unknown pattern '" + name + "'");
          vpos = bar + 1;
        }
      } else {
        throw std::invalid_argument("rule: unknown key '" + key + "'");
      }
      pos = comma + 1;
    }
  }
  if (kind == "bernoulli") {
    if (p < 0.0) throw std::invalid_argument("rule bernoulli: missing p");
    return bernoulli(p);
  }
  if (kind == "zoo") {
    if (q < 0.0) throw std::invalid_argument("rule zoo: missing q");
    if (patterns.empty()) patterns.push_back(ball_pattern(spec, 1));
    return poisson_zoo(std::move(patterns), q);
  }
  if (kind == "minlabel") {
    if (window < 0) throw std::invalid_argument("rule minlabel: missing r");
    return min_label(window);
  }
  throw std::invalid_argument("rule: unknown kind '" + kind + "'");
}

RuleEvaluator::RuleEvaluator(GroupSpec spec, LocalRule rule)
    : spec_(spec), rule_(std::move(rule)) {
  if (rule_.kind == LocalRule::Kind::kPoissonZoo) {
    for (const auto& pat : rule_.patterns)
      for (const auto& g : pat) {
        const GroupElement cand = g.inverse();
        if (std::find(candidates_.begin(), candidates_.end(), cand) == candidates_.end())
          candidates_.push_back(cand);
      }
    std::sort(candidates_.begin(), candidates_.end());
    covers_.resize(candidates_.size());
    for (std::size_t ci = 0; ci < candidates_.size(); ++ci) {
      covers_[ci].resize(rule_.patterns.size());
      const GroupElement phi = candidates_[ci].inverse();
      for (std::size_t j = 0; j < rule_.patterns.size(); ++j)
        covers_[ci][j] = std::find(rule_.patterns[j].begin(), rule_.patterns[j].end(), phi) !=
                                 rule_.patterns[j].end()
                             ? 1
                             : 0;
    }
  } else if (rule_.kind == LocalRule::Kind::kMinLabel) {
    window_elements_ = ball_pattern(spec_, rule_.window);
  }
}

bool RuleEvaluator::zoo_plants_here(std::uint64_t world_seed, const GroupElement& u,
                                    int* pattern_out, const ZooForcing* forcing) const {
  if (forcing) {
    for (std::size_t k = 0; k < forcing->elements.size(); ++k) {
      if (forcing->elements[k] == u) {
        if (!forcing->seeded[k]) return false;
        *pattern_out = forcing->pattern_index[k];
        return true;
      }
    }
  }
  if (Rng::to_unit(element_label(world_seed, u, 0)) >= rule_.q) return false;
  *pattern_out = bounded_word(world_seed, u, 1, pattern_count(rule_));
  return true;
}

bool RuleEvaluator::member(std::uint64_t world_seed, const GroupElement& v,
                           const ZooForcing* forcing) const {
  switch (rule_.kind) {
    case LocalRule::Kind::kBernoulli:
      return Rng::to_unit(element_label(world_seed, v, 0)) < rule_.p;
    case LocalRule::Kind::kMinLabel: {
      const std::uint64_t mine = element_label(world_seed, v, 0);
      for (const auto& off : window_elements_) {
        if (off.is_identity()) continue;
        if (element_label(world_seed, v * off, 0) < mine) return false;
      }
      return true;
    }
    case LocalRule::Kind::kPoissonZoo: {
      for (std::size_t ci = 0; ci < candidates_.size(); ++ci) {
        const GroupElement u = v * candidates_[ci];
        int j = -1;
        if (zoo_plants_here(world_seed, u, &j, forcing) && covers_[ci][static_cast<std::size_t>(j)])
          return true;
      }
      return false;
    }
  }
  return false;
}

double RuleEvaluator::zoo_root_density() const {
  if (rule_.kind != LocalRule::Kind::kPoissonZoo)
    throw std::logic_error("zoo_root_density: not a zoo rule");
  double miss = 1.0;
  const double m = pattern_count(rule_);
  for (std::size_t ci = 0; ci < candidates_.size(); ++ci) {
    int mu = 0;
    for (char c : covers_[ci]) mu += c;
    miss *= 1.0 - rule_.q * static_cast<double>(mu) / m;
  }
  return 1.0 - miss;
}

ZooForcing RuleEvaluator::draw_conditioned_cover(std::uint64_t world_seed,
                                                 std::uint64_t draw_key) const {
  if (rule_.kind != LocalRule::Kind::kPoissonZoo)
    throw std::logic_error("draw_conditioned_cover: not a zoo rule");
  const std::size_t nc = candidates_.size();
  const double m = pattern_count(rule_);
  std::vector<double> cover_p(nc);
  std::vector<int> mcount(nc);
  for (std::size_t ci = 0; ci < nc; ++ci) {
    int mu = 0;
    for (char c : covers_[ci]) mu += c;
    mcount[ci] = mu;
    cover_p[ci] = rule_.q * static_cast<double>(mu) / m;
  }
  // suffix miss probabilities
  std::vector<double> suffix_miss(nc + 1, 1.0);
  for (std::size_t ci = nc; ci-- > 0;)
    suffix_miss[ci] = suffix_miss[ci + 1] * (1.0 - cover_p[ci]);

  Rng rng(key_of({world_seed, kCondTag, draw_key}));
  ZooForcing forcing;
  forcing.elements = candidates_;
  forcing.seeded.assign(nc, 0);
  forcing.pattern_index.assign(nc, 0);
  bool have_cover = false;
  for (std::size_t ci = 0; ci < nc; ++ci) {
    const double pc = have_cover ? cover_p[ci] : cover_p[ci] / (1.0 - suffix_miss[ci]);
    if (rng.next_unit() < pc) {
      have_cover = true;
      forcing.seeded[ci] = 1;
      // uniform among covering patterns
      int pick = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(mcount[ci])));
      for (std::size_t j = 0; j < covers_[ci].size(); ++j) {
        if (!covers_[ci][j]) continue;
        if (pick-- == 0) {
          forcing.pattern_index[ci] = static_cast<int>(j);
          break;
        }
      }
    } else {
      // split the no-cover mass between "not seeded" and "seeded, non-covering pattern"
      const double no_cover = 1.0 - cover_p[ci];
      const double seeded_non = rule_.q * (1.0 - static_cast<double>(mcount[ci]) / m);
      if (rng.next_unit() < seeded_non / no_cover) {
        forcing.seeded[ci] = 1;
        const int non = pattern_count(rule_) - mcount[ci];
        int pick = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(non)));
        for (std::size_t j = 0; j < covers_[ci].size(); ++j) {
          if (covers_[ci][j]) continue;
          if (pick-- == 0) {
            forcing.pattern_index[ci] = static_cast<int>(j);
            break;
          }
        }
      }
    }
  }
  return forcing;
}

BallConfig sample_config(const GroupSpec& spec, const LocalRule& rule, int radius,
                         std::uint64_t seed) {
  auto ball = std::make_shared<const CayleyBall>(spec, radius);
  auto evaluator = std::make_shared<const RuleEvaluator>(spec, rule);
  return sample_config(std::move(ball), std::move(evaluator), seed,
                       GroupElement::identity(spec));
}

BallConfig sample_config(std::shared_ptr<const CayleyBall> ball,
                         std::shared_ptr<const RuleEvaluator> evaluator, std::uint64_t seed,
                         const GroupElement& center) {
  const int valid = ball->radius() - evaluator->rule().radius();
  if (valid < 0) throw std::invalid_argument("sample_config: window smaller than the rule radius");
  BallConfig cfg;
  cfg.valid_radius = valid;
  cfg.seed = seed;
  cfg.center = center;
  cfg.labels.resize(ball->size());
  cfg.membership.assign(ball->size(), -1);
  for (std::size_t idx = 0; idx < ball->size(); ++idx) {
    const GroupElement g = center * ball->vertex(idx);
    cfg.labels[idx] = element_label(seed, g, 0);
    if (ball->distance(idx) <= valid)
      cfg.membership[idx] = evaluator->member(seed, g) ? 1 : 0;
  }
  cfg.ball = std::move(ball);
  cfg.evaluator = std::move(evaluator);
  return cfg;
}

ComponentStats components(const BallConfig& config) {
  const CayleyBall& ball = *config.ball;
  const int gens = ball.spec().generator_count();
  const std::size_t defined = ball.count_within(config.valid_radius);
  std::vector<std::int8_t> seen(defined, 0);
  ComponentStats stats;
  std::deque<std::size_t> queue;
  for (std::size_t root = 0; root < defined; ++root) {
    if (seen[root] || !config.in_set(root)) continue;
    int size = 0;
    bool touches = false;
    seen[root] = 1;
    queue.push_back(root);
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      ++size;
      if (ball.distance(v) == config.valid_radius) touches = true;
      for (int j = 0; j < gens; ++j) {
        const std::int64_t nb = ball.neighbor(v, j);
        if (nb < 0 || static_cast<std::size_t>(nb) >= defined) continue;
        if (!seen[static_cast<std::size_t>(nb)] && config.in_set(static_cast<std::size_t>(nb))) {
          seen[static_cast<std::size_t>(nb)] = 1;
          queue.push_back(static_cast<std::size_t>(nb));
        }
      }
    }
    (touches ? stats.boundary_sizes : stats.interior_sizes).push_back(size);
  }
  auto desc = [](std::vector<int>& v) { std::sort(v.begin(), v.end(), std::greater<int>()); };
  desc(stats.interior_sizes);
  desc(stats.boundary_sizes);
  return stats;
}

CutResult cut_random_carving(const BallConfig& config, int k_target, std::uint64_t seed) {
  if (k_target < 1) throw std::invalid_argument("cut_random_carving: k_target must be positive");
  const CayleyBall& ball = *config.ball;
  const int gens = ball.spec().generator_count();
  const std::size_t defined = ball.count_within(config.valid_radius);

  CutResult out;
  out.k_target = k_target;
  out.seed = seed;
  out.state.assign(ball.size(), 3);
  std::vector<std::uint64_t> carve_label(defined);
  for (std::size_t v = 0; v < defined; ++v) {
    carve_label[v] = element_label(key_of({seed, kCarveTag}), config.center * ball.vertex(v), 0);
    if (config.in_set(v)) out.state[v] = 0;
  }

  std::vector<std::size_t> visit(defined);
  for (std::size_t v = 0; v < defined; ++v) visit[v] = v;
  std::sort(visit.begin(), visit.end(), [&](std::size_t a, std::size_t b) {
    return carve_label[a] != carve_label[b] ? carve_label[a] < carve_label[b] : a < b;
  });

  using Seed = std::pair<std::uint64_t, std::size_t>;
  std::priority_queue<Seed, std::vector<Seed>, std::greater<Seed>> seeds;
  std::vector<std::size_t> cluster, fresh_cut;
  std::deque<std::size_t> frontier;

  for (std::size_t start : visit) {
    if (out.state[start] != 0) continue;
    seeds.push({carve_label[start], start});
    while (!seeds.empty()) {
      const std::size_t s = seeds.top().second;
      seeds.pop();
      if (out.state[s] != 0) continue;
      // BFS cluster of at most k_target free vertices
      cluster.clear();
      frontier.clear();
      out.state[s] = 1;
      cluster.push_back(s);
      frontier.push_back(s);
      while (!frontier.empty() && static_cast<int>(cluster.size()) < k_target) {
        const std::size_t v = frontier.front();
        frontier.pop_front();
        for (int j = 0; j < gens && static_cast<int>(cluster.size()) < k_target; ++j) {
          const std::int64_t nb = ball.neighbor(v, j);
          if (nb < 0 || static_cast<std::size_t>(nb) >= defined) continue;
          if (out.state[static_cast<std::size_t>(nb)] == 0) {
            out.state[static_cast<std::size_t>(nb)] = 1;
            cluster.push_back(static_cast<std::size_t>(nb));
            frontier.push_back(static_cast<std::size_t>(nb));
          }
        }
      }
      // cut the free boundary, then seed flush continuations past the cut
      fresh_cut.clear();
      for (std::size_t v : cluster)
        for (int j = 0; j < gens; ++j) {
          const std::int64_t nb = ball.neighbor(v, j);
          if (nb < 0 || static_cast<std::size_t>(nb) >= defined) continue;
          if (out.state[static_cast<std::size_t>(nb)] == 0) {
            out.state[static_cast<std::size_t>(nb)] = 2;
            fresh_cut.push_back(static_cast<std::size_t>(nb));
          }
        }
      for (std::size_t c : fresh_cut)
        for (int j = 0; j < gens; ++j) {
          const std::int64_t nb = ball.neighbor(c, j);
          if (nb < 0 || static_cast<std::size_t>(nb) >= defined) continue;
          if (out.state[static_cast<std::size_t>(nb)] == 0)
            seeds.push({carve_label[static_cast<std::size_t>(nb)], static_cast<std::size_t>(nb)});
        }
    }
  }

  // statistics on the inner window (one layer clear of the membership shell)
  const int stats_radius = config.valid_radius > 0 ? config.valid_radius - 1 : 0;
  const std::size_t stats_end = ball.count_within(stats_radius);
  for (std::size_t v = 0; v < stats_end; ++v) {
    if (!config.in_set(v)) continue;
    ++out.set_in_window;
    if (out.state[v] == 2) ++out.cut_in_window;
  }
  out.cut_fraction = out.set_in_window
                         ? static_cast<double>(out.cut_in_window) / static_cast<double>(out.set_in_window)
                         : 0.0;

  // hard postcondition: components of E minus C stay within k_target
  std::vector<std::int8_t> seen(defined, 0);
  std::deque<std::size_t> queue;
  for (std::size_t root = 0; root < defined; ++root) {
    if (seen[root] || out.state[root] != 1) continue;
    int size = 0;
    seen[root] = 1;
    queue.push_back(root);
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      ++size;
      for (int j = 0; j < gens; ++j) {
        const std::int64_t nb = ball.neighbor(v, j);
        if (nb < 0 || static_cast<std::size_t>(nb) >= defined) continue;
        if (!seen[static_cast<std::size_t>(nb)] && out.state[static_cast<std::size_t>(nb)] == 1) {
          seen[static_cast<std::size_t>(nb)] = 1;
          queue.push_back(static_cast<std::size_t>(nb));
        }
      }
    }
    out.k_emp = std::max(out.k_emp, size);
  }
  if (out.k_emp > k_target)
    throw std::logic_error("cut_random_carving: component exceeded k_target");
  return out;
}

double selection_probability(double weight, double eps) {
  return 1.0 - std::exp(4.0 * std::log(eps) * weight);
}

std::vector<std::size_t> exponential_selection(const std::vector<double>& weights, double eps,
                                               std::uint64_t seed) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("exponential_selection: need 0 < eps < 1/2");
  for (double w : weights)
    if (!(w > 0.0)) throw std::invalid_argument("exponential_selection: weights must be positive");
  Rng rng(key_of({seed, 0x5e1ull}));
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < weights.size(); ++k)
    if (rng.next_unit() < selection_probability(weights[k], eps)) out.push_back(k);
  return out;
}

PairModelBound pairmodel_bound(int generating_set_size, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("pairmodel_bound: need 0 < eps < 1/2");
  if (generating_set_size < 1) throw std::invalid_argument("pairmodel_bound: empty generating set");
  PairModelBound out;
  out.epsilon_prime = -11.0 * generating_set_size * eps * std::log(eps);
  out.vacuous = out.epsilon_prime >= 1.0;
  return out;
}

DensityEstimate density_estimate(const GroupSpec& spec, const LocalRule& rule,
                                 std::uint64_t n_samples, std::uint64_t seed, int threads) {
  if (n_samples < 1) throw std::invalid_argument("density_estimate: need at least one sample");
  const RuleEvaluator evaluator(spec, rule);
  const GroupElement root = GroupElement::identity(spec);
  const int nthreads = resolve_threads(threads);
  std::vector<std::uint64_t> hits(static_cast<std::size_t>(nthreads), 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(n_samples); ++s) {
#ifdef _OPENMP
    const int tid = omp_get_thread_num();
#else
    const int tid = 0;
#endif
    if (evaluator.member(key_of({seed, 0xd15ull, static_cast<std::uint64_t>(s)}), root))
      ++hits[static_cast<std::size_t>(tid)];
  }
  std::uint64_t total = 0;
  for (auto hct : hits) total += hct;
  DensityEstimate est;
  est.samples = n_samples;
  est.p_hat = static_cast<double>(total) / static_cast<double>(n_samples);
  est.ci95 = 1.96 * std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(n_samples));
  return est;
}

std::vector<CurveRow> hyperfiniteness_curve(const GroupSpec& spec,
                                            const std::vector<LocalRule>& rules, int k_target,
                                            int radius, int trials, std::uint64_t seed,
                                            int threads) {
  std::vector<CurveRow> rows;
  const auto ball = std::make_shared<const CayleyBall>(spec, radius);
  const int nthreads = resolve_threads(threads);
  for (std::size_t ri = 0; ri < rules.size(); ++ri) {
    const auto evaluator = std::make_shared<const RuleEvaluator>(spec, rules[ri]);
    std::vector<double> cutf(static_cast<std::size_t>(trials)), kemp(static_cast<std::size_t>(trials)),
        dens(static_cast<std::size_t>(trials));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
#endif
    for (int ti = 0; ti < trials; ++ti) {
      const std::uint64_t trial_seed = key_of({seed, 0xc52ull, static_cast<std::uint64_t>(ri),
                                               static_cast<std::uint64_t>(ti)});
      const BallConfig cfg = sample_config(ball, evaluator, trial_seed, GroupElement::identity(spec));
      const CutResult cut = cut_random_carving(cfg, k_target, key_of({trial_seed, 0x1cull}));
      cutf[static_cast<std::size_t>(ti)] = cut.cut_fraction;
      kemp[static_cast<std::size_t>(ti)] = cut.k_emp;
      const std::size_t defined = ball->count_within(cfg.valid_radius);
      std::uint64_t members = 0;
      for (std::size_t v = 0; v < defined; ++v) members += cfg.in_set(v) ? 1u : 0u;
      dens[static_cast<std::size_t>(ti)] = static_cast<double>(members) / static_cast<double>(defined);
    }
    CurveRow row;
    row.density_param = rules[ri].kind == LocalRule::Kind::kBernoulli ? rules[ri].p : rules[ri].q;
    for (int ti = 0; ti < trials; ++ti) {
      row.mean_cut_fraction += cutf[static_cast<std::size_t>(ti)];
      row.mean_k_emp += kemp[static_cast<std::size_t>(ti)];
      row.mean_density += dens[static_cast<std::size_t>(ti)];
    }
    row.mean_cut_fraction /= trials;
    row.mean_k_emp /= trials;
    row.mean_density /= trials;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace esmlab::fiid
