#include "esmlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "esmlab/entropy.hpp"
#include "esmlab/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace esmlab::bounds {

namespace {

int resolve_threads(int threads) {
#ifdef _OPENMP
  return threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  return 1;
#endif
}

// All per-cell quantities of one slice-coordinate pair, for V inside U.
struct Cell {
  double eU = 0, eU0 = 0, eU1 = 0;
  double eV = 0, eV0 = 0, eV1 = 0;
  double dU = 0, dV = 0, dUV = 0;
  double ratio = 0;        // eV / eU (0 on empty U-slice)
  double hU = 0, hV = 0;   // h(eU0/eU), h(eV0/eV)
  double s1 = 0, s1_closed = 0, s2 = 0, s3 = 0, r = 0;

  void fill(std::uint32_t cu, std::uint32_t cu0, std::uint32_t cv, std::uint32_t cv0,
            std::uint64_t pts) {
    const double inv = 1.0 / static_cast<double>(pts);
    eU = cu * inv; eU0 = cu0 * inv; eU1 = (cu - cu0) * inv;
    eV = cv * inv; eV0 = cv0 * inv; eV1 = (cv - cv0) * inv;
    dU = h(eU) - 0.5 * h(2 * eU0) - 0.5 * h(2 * eU1);
    dV = h(eV) - 0.5 * h(2 * eV0) - 0.5 * h(2 * eV1);
    dUV = h3(eV, eU - eV, 1 - eU)
        - 0.5 * h3(2 * eV0, 2 * (eU0 - eV0), 1 - 2 * eU0)
        - 0.5 * h3(2 * eV1, 2 * (eU1 - eV1), 1 - 2 * eU1);
    ratio = cu ? static_cast<double>(cv) / static_cast<double>(cu) : 0.0;
    hU = cu ? h(static_cast<double>(cu0) / static_cast<double>(cu)) : 0.0;
    hV = cv ? h(static_cast<double>(cv0) / static_cast<double>(cv)) : 0.0;
    s1 = dUV - dU;
    s1_closed = eU * hU - eV * hV;
    if (cu > cv)
      s1_closed -= (eU - eV) * h(static_cast<double>(cu0 - cv0) / static_cast<double>(cu - cv));
    s2 = eV * (hU - hV);
    const double diff = dV - ratio * dU;
    s3 = diff - s2;
    r = diff > 0.0 ? diff : 0.0;
  }

  int region(const RegionKappas& k) const {
    if (eU <= 0.0) return 1;
    if (dV - ratio * dU < 0.0) return 1;
    if (eU > k.k0) return 2;
    if (ratio < k.k1) return 3;
    if (ratio > 1.0 - k.k1) return 4;
    return 5;
  }
};

Cell cell_at(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord,
             std::uint32_t w, int i) {
  const ConditionalDensities du = conditional_densities(u, ord, w, i);
  const ConditionalDensities dv = conditional_densities(v, ord, w, i);
  const int p = ord.rank(i);
  const std::uint64_t pts = std::uint64_t{1} << (u.n() - p);
  Cell c;
  c.fill(static_cast<std::uint32_t>(du.eps * pts + 0.5), static_cast<std::uint32_t>(du.eps0 * pts + 0.5),
         static_cast<std::uint32_t>(dv.eps * pts + 0.5), static_cast<std::uint32_t>(dv.eps0 * pts + 0.5),
         pts);
  return c;
}

void require_nested(const CubeSubset& u, const CubeSubset& v) {
  if (!v.subset_of(u)) throw std::invalid_argument("V must be contained in U");
}

// s2 bound right-hand side at one cell; s1 clamped at zero under the square root.
double s2_rhs(const Cell& c, double k1, double k2) {
  const double s1c = c.s1 > 0.0 ? c.s1 : 0.0;
  return -8.0 / std::sqrt(k1) * std::log(k2) * (std::sqrt(c.dU * s1c) + std::sqrt(c.dV * s1c))
       + 4.0 * h(2.0 * k2 / k1) * c.dU;
}

// Accumulates one lemma check.
struct Tally {
  LemmaCounts c;
  void check(double lhs, double rhs) {
    ++c.checked;
    const double slack = lhs - rhs;
    if (slack > c.max_slack) c.max_slack = slack;
    if (slack > kTol) ++c.violated;
  }
  void skip() { ++c.skipped; }
  void merge(const Tally& o) {
    c.checked += o.c.checked;
    c.skipped += o.c.skipped;
    c.violated += o.c.violated;
    c.max_slack = std::max(c.max_slack, o.c.max_slack);
  }
};

struct SweepTallies {
  Tally delta_alt, hquad, s1_nonneg, s1_closed, s1_lower, delta_approx, s3, s2;
  Tally region_i[5];
  Tally region_sum, s1_integral, pair_route;

  void merge(const SweepTallies& o) {
    delta_alt.merge(o.delta_alt); hquad.merge(o.hquad);
    s1_nonneg.merge(o.s1_nonneg); s1_closed.merge(o.s1_closed);
    s1_lower.merge(o.s1_lower); delta_approx.merge(o.delta_approx);
    s3.merge(o.s3); s2.merge(o.s2);
    for (int d = 0; d < 5; ++d) region_i[d].merge(o.region_i[d]);
    region_sum.merge(o.region_sum); s1_integral.merge(o.s1_integral);
    pair_route.merge(o.pair_route);
  }

  void to_report(SweepReport* rep) const {
    auto& m = rep->lemmas;
    m["delta_alternate"] = delta_alt.c;
    m["hquad"] = hquad.c;
    m["s1_nonneg"] = s1_nonneg.c;
    m["s1_closed_form"] = s1_closed.c;
    m["s1_lower"] = s1_lower.c;
    m["delta_approx"] = delta_approx.c;
    m["s3_bound"] = s3.c;
    m["s2_bound"] = s2.c;
    for (int d = 0; d < 5; ++d) m["region_I" + std::to_string(d + 1)] = region_i[d].c;
    m["region_sum"] = region_sum.c;
    m["s1_integral"] = s1_integral.c;
    m["pair_route"] = pair_route.c;
  }
};

// Per-cell checks shared by both sweeps. `weight` is the measure 2^{-level}
// of the slice; `alt` is the alternate-route Delta for the agreement check.
void run_cell(const Cell& c, double alt_dU, double weight, const RegionKappas& kap,
              double kappa_s1low, SweepTallies* t, double* s1_sum, double* excess,
              double region_acc[5]) {
  t->delta_alt.check(std::fabs(c.dU - alt_dU), 0.0);
  t->s1_nonneg.check(-c.s1, 0.0);
  t->s1_closed.check(std::fabs(c.s1 - c.s1_closed), 0.0);
  if (c.eU > 0.0) {
    const double x = c.eU0 / c.eU;
    const double gap = std::fabs(h(x) - h(0.5));
    const double sq = (x - 0.5) * (x - 0.5);
    t->hquad.check(2.0 * sq, gap);
    t->hquad.check(gap, 8.0 * sq);
  }
  if (c.eU > 0.0 && c.eV > 0.0 && c.ratio >= kappa_s1low && c.ratio <= 1.0 - kappa_s1low) {
    const double gap = c.eU0 / c.eU - c.eV0 / c.eV;
    t->s1_lower.check(2.0 * kappa_s1low * c.eU * gap * gap, std::fabs(c.s1));
  } else {
    t->s1_lower.skip();
  }
  if (c.eU > 0.0 && c.eU <= 0.25) {
    const double mid = c.dU - c.eU * (h(0.5) - c.hU);
    t->delta_approx.check(-mid, 0.0);
    t->delta_approx.check(mid, 16.0 * c.eU * c.dU);
  } else {
    t->delta_approx.skip();
  }
  t->s3.check(std::fabs(c.s3), 16.0 * (c.eU * c.dU + c.eV * c.dV));
  if (c.eU > 0.0 && c.eV > 0.0 && c.ratio >= kap.k1 && c.ratio <= 1.0 - kap.k1) {
    t->s2.check(std::fabs(c.s2), s2_rhs(c, kap.k1, kap.k2));
  } else {
    t->s2.skip();
  }
  *s1_sum += weight * c.s1;
  *excess += weight * c.r;
  region_acc[c.region(kap) - 1] += weight * c.r;
}

void region_bounds_at(double mu_u, double h_u, const RegionKappas& k, double bound[5]) {
  bound[0] = 0.0;
  bound[1] = -4.0 * mu_u * std::log(k.k0);
  bound[2] = h_u > 0.0 ? h(k.k0 * k.k1) / h(k.k0) * h_u : 0.0;
  bound[3] = k.k1 * h_u + mu_u;
  bound[4] = (32.0 * k.k0 + 4.0 * h(2.0 * k.k2 / k.k1)) * h_u
           - 16.0 / std::sqrt(k.k1) * std::log(k.k2) * std::sqrt(h_u * mu_u);
}

// Checks the five region bounds plus the partition identity for one triple.
void run_triple_regions(double mu_u, double mu_v, double h_u, const RegionKappas& kap,
                        const double region_acc[5], double excess, double s1_sum,
                        SweepTallies* t) {
  double bound[5];
  region_bounds_at(mu_u, h_u, kap, bound);
  for (int d = 0; d < 5; ++d) t->region_i[d].check(region_acc[d], bound[d]);
  double total = 0.0;
  for (int d = 0; d < 5; ++d) total += region_acc[d];
  t->region_sum.check(std::fabs(total - excess), 0.0);
  const double expect = mu_u > 0.0 ? mu_u * h(mu_v / mu_u) : 0.0;
  t->s1_integral.check(std::fabs(s1_sum - expect), 0.0);
}

}  // namespace

RegionKappas asymptotic_kappas(double mu_u) {
  if (mu_u <= 0.0 || mu_u >= 1.0) return {};
  const double l = -std::log(mu_u);
  return {std::pow(l, -1.0 / 3.0), std::pow(l, -1.0 / 3.0), 1.0 / l};
}

double joint_delta(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord,
                   std::uint32_t w, int i) {
  require_nested(u, v);
  return cell_at(u, v, ord, w, i).dUV;
}

DecompositionTerms s_terms(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord,
                           std::uint32_t w, int i, const RegionKappas& kappas) {
  require_nested(u, v);
  if (!kappas.valid())
    throw std::invalid_argument("s_terms: need 0 < kappa2 <= kappa1/8, kappa1 <= 1/8, kappa0 < 1/4");
  const Cell c = cell_at(u, v, ord, w, i);
  DecompositionTerms out;
  out.s1 = c.s1;
  out.s2 = c.s2;
  out.s3 = c.s3;
  out.r = c.r;
  out.region = c.region(kappas);
  out.kappa0 = kappas.k0;
  out.kappa1 = kappas.k1;
  out.kappa2 = kappas.k2;
  return out;
}

HquadResult check_hquad(double x) {
  const double gap = std::fabs(h(x) - h(0.5));
  const double sq = (x - 0.5) * (x - 0.5);
  return {2.0 * sq <= gap + kTol, gap <= 8.0 * sq + kTol};
}

CheckOutcome check_s1_lower(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord,
                            std::uint32_t w, int i, double kappa) {
  require_nested(u, v);
  const Cell c = cell_at(u, v, ord, w, i);
  if (c.eU <= 0.0 || c.eV <= 0.0 || c.ratio < kappa || c.ratio > 1.0 - kappa)
    return CheckOutcome::kSkipped;
  const double gap = c.eU0 / c.eU - c.eV0 / c.eV;
  return std::fabs(c.s1) >= 2.0 * kappa * c.eU * gap * gap - kTol ? CheckOutcome::kPassed
                                                                  : CheckOutcome::kViolated;
}

CheckOutcome check_delta_approx(const CubeSubset& u, const LinearOrder& ord, std::uint32_t w, int i) {
  const ConditionalDensities d = conditional_densities(u, ord, w, i);
  if (d.eps <= 0.0 || d.eps > 0.25) return CheckOutcome::kSkipped;
  const double du = h(d.eps) - 0.5 * h(2 * d.eps0) - 0.5 * h(2 * d.eps1);
  const double mid = du - d.eps * (h(0.5) - h(d.eps0 / d.eps));
  return (mid >= -kTol && mid <= 16.0 * d.eps * du + kTol) ? CheckOutcome::kPassed
                                                           : CheckOutcome::kViolated;
}

CheckOutcome check_s3(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord,
                      std::uint32_t w, int i) {
  require_nested(u, v);
  const Cell c = cell_at(u, v, ord, w, i);
  return std::fabs(c.s3) <= 16.0 * (c.eU * c.dU + c.eV * c.dV) + kTol ? CheckOutcome::kPassed
                                                                      : CheckOutcome::kViolated;
}

CheckOutcome check_s2(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord,
                      std::uint32_t w, int i, double kappa1, double kappa2) {
  require_nested(u, v);
  if (!(kappa1 > 0.0 && kappa1 < 0.25 && kappa2 > 0.0 && kappa2 <= kappa1 / 8.0))
    throw std::invalid_argument("check_s2: kappa hypotheses fail");
  const Cell c = cell_at(u, v, ord, w, i);
  if (c.eU <= 0.0 || c.eV <= 0.0 || c.ratio < kappa1 || c.ratio > 1.0 - kappa1)
    return CheckOutcome::kSkipped;
  return std::fabs(c.s2) <= s2_rhs(c, kappa1, kappa2) + kTol ? CheckOutcome::kPassed
                                                             : CheckOutcome::kViolated;
}

RegionIntegrals region_integrals(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord,
                                 const RegionKappas& kappas) {
  require_nested(u, v);
  if (!kappas.valid()) throw std::invalid_argument("region_integrals: kappa hypotheses fail");
  RegionIntegrals out;
  out.kappas = kappas;
  for_each_level(u, &v, ord, [&](const LevelSlices& lv) {
    const double weight = std::ldexp(1.0, -lv.level);
    const std::size_t slices = std::size_t{1} << lv.level;
    for (std::size_t s = 0; s < slices; ++s) {
      if (lv.cnt_u[s] == 0) continue;
      Cell c;
      c.fill(lv.cnt_u[s], lv.cnt_u0[s], lv.cnt_v[s], lv.cnt_v0[s], lv.slice_points);
      out.integral[c.region(kappas) - 1] += weight * c.r;
      out.excess += weight * c.r;
    }
  });
  region_bounds_at(measure(u), subset_entropy(u), kappas, out.bound);
  return out;
}

RegionIntegrals region_integrals(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord) {
  return region_integrals(u, v, ord, asymptotic_kappas(measure(u)));
}

bool SweepReport::clean() const { return total_violations() == 0; }

std::uint64_t SweepReport::total_violations() const {
  std::uint64_t t = 0;
  for (const auto& [name, c] : lemmas) t += c.violated;
  return t;
}

namespace {

// ---- dense exhaustive kernel (small n) ----
//
// Subsets fit in a machine word, slice membership masks are precomputed per
// (order, level, slice), and every entropy evaluation is a table lookup on
// dyadic rationals k/2^n or small integer ratios a/b. The generic Cell::fill
// path serves as the reference implementation in the unit tests.

struct DenseLut {
  int n;
  std::uint32_t cube;
  std::vector<double> hq;   // h(k / 2^n)
  std::vector<double> tl;   // -(k/2^n) log(k/2^n)
  std::vector<double> hfrac;  // h(a/b), index a*(cube+1)+b

  explicit DenseLut(int n_arg) : n(n_arg), cube(1u << n_arg) {
    hq.resize(cube + 1);
    tl.resize(cube + 1);
    for (std::uint32_t k = 0; k <= cube; ++k) {
      const double x = static_cast<double>(k) / cube;
      hq[k] = h(x);
      tl[k] = tlog(x);
    }
    hfrac.assign(static_cast<std::size_t>(cube + 1) * (cube + 1), 0.0);
    for (std::uint32_t b = 1; b <= cube; ++b)
      for (std::uint32_t a = 0; a <= b; ++a)
        hfrac[static_cast<std::size_t>(a) * (cube + 1) + b] = h(static_cast<double>(a) / b);
  }
  double frac(std::uint32_t a, std::uint32_t b) const {
    return hfrac[static_cast<std::size_t>(a) * (cube + 1) + b];
  }
};

struct SliceMasks {
  // masks[ord][cell] and masks0[ord][cell]; cell enumerates (level, slice id).
  int n = 0;
  int cells = 0;
  std::vector<int> level_of;                 // per cell
  std::vector<std::vector<std::uint32_t>> masks, masks0;
  std::vector<LinearOrder> orders;

  explicit SliceMasks(int n_arg) : n(n_arg) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    do {
      std::vector<int> rank(n);
      for (int p = 0; p < n; ++p) rank[perm[p]] = p;
      orders.emplace_back(rank);
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (int p = 0; p < n; ++p)
      for (int s = 0; s < (1 << p); ++s) level_of.push_back(p);
    cells = static_cast<int>(level_of.size());
    const std::uint32_t cube = 1u << n;
    for (const auto& ord : orders) {
      std::vector<std::uint32_t> m(cells, 0), m0(cells, 0);
      int cell = 0;
      for (int p = 0; p < n; ++p) {
        const std::uint32_t pmask = ord.prefix_mask(p);
        const std::uint32_t cbit = 1u << ord.coord_at(p);
        for (std::uint32_t s = 0; s < (1u << p); ++s, ++cell) {
          // expand slice id bits to coordinate positions
          std::uint32_t anchor = 0;
          for (int j = 0; j < p; ++j)
            if ((s >> j) & 1u) anchor |= 1u << ord.coord_at(j);
          for (std::uint32_t w = 0; w < cube; ++w) {
            if ((w & pmask) == anchor) {
              m[cell] |= 1u << w;
              if (!(w & cbit)) m0[cell] |= 1u << w;
            }
          }
        }
      }
      masks.push_back(std::move(m));
      masks0.push_back(std::move(m0));
    }
  }
};

// Cell quantities via lookup tables; mirrors Cell::fill.
struct FastCell {
  double eU, eV, dU, dV, ratio, s1, s1_closed, s2, s3, r, hU, hV, eU0_over, eV0_over, dU_alt;

  void fill(std::uint32_t cu, std::uint32_t cu0, std::uint32_t cv, std::uint32_t cv0,
            int level, const DenseLut& lut) {
    const int n = lut.n;
    const std::uint32_t cube = lut.cube;
    const std::uint32_t pts = cube >> level;
    const int up = level;          // scale count -> k/2^n index
    const int up1 = level + 1;     // doubled densities
    const std::uint32_t cu1 = cu - cu0, cv1 = cv - cv0;
    const double inv_cube = 1.0 / cube;
    eU = static_cast<double>(cu << up) * inv_cube;
    eV = static_cast<double>(cv << up) * inv_cube;
    dU = lut.hq[cu << up] - 0.5 * (lut.hq[cu0 << up1] + lut.hq[cu1 << up1]);
    dV = lut.hq[cv << up] - 0.5 * (lut.hq[cv0 << up1] + lut.hq[cv1 << up1]);
    const double dUV =
        lut.tl[cv << up] + lut.tl[(cu - cv) << up] + lut.tl[cube - (cu << up)]
        - 0.5 * (lut.tl[cv0 << up1] + lut.tl[(cu0 - cv0) << up1] + lut.tl[cube - (cu0 << up1)])
        - 0.5 * (lut.tl[cv1 << up1] + lut.tl[(cu1 - cv1) << up1] + lut.tl[cube - (cu1 << up1)]);
    ratio = cu ? static_cast<double>(cv) / cu : 0.0;
    hU = cu ? lut.frac(cu0, cu) : 0.0;
    hV = cv ? lut.frac(cv0, cv) : 0.0;
    eU0_over = cu ? static_cast<double>(cu0) / cu : 0.0;
    eV0_over = cv ? static_cast<double>(cv0) / cv : 0.0;
    s1 = dUV - dU;
    s1_closed = eU * hU - eV * hV;
    if (cu > cv)
      s1_closed -= (eU - eV) * lut.frac(cu0 - cv0, cu - cv);
    s2 = eV * (hU - hV);
    const double diff = dV - ratio * dU;
    s3 = diff - s2;
    r = diff > 0.0 ? diff : 0.0;
    // alternate route for Delta_U: conditional entropy of the revealed bit
    dU_alt = 0.0;
    if (cu) dU_alt += eU * (kLog2 - hU);
    if (cu < pts)
      dU_alt += (1.0 - eU) * (kLog2 - lut.frac(pts / 2 - cu0, pts - cu));
  }
};

}  // namespace

SweepReport sweep_exhaustive(int n, int max_u_size, int threads) {
  if (n < 2 || n > 4) throw std::invalid_argument("sweep_exhaustive: supported for n in [2,4]");
  const DenseLut lut(n);
  const SliceMasks sm(n);
  const std::uint32_t subsets = 1u << (1u << n);
  const RegionKappas kap = kSweepKappas;
  const int nthreads = resolve_threads(threads);

  std::vector<SweepTallies> partial(static_cast<std::size_t>(nthreads));
  std::vector<std::uint64_t> triple_count(static_cast<std::size_t>(nthreads), 0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 256) num_threads(nthreads)
#endif
  for (std::int64_t ubits_s = 1; ubits_s < static_cast<std::int64_t>(subsets); ++ubits_s) {
    const std::uint32_t ubits = static_cast<std::uint32_t>(ubits_s);
    if (__builtin_popcount(ubits) > max_u_size) continue;
#ifdef _OPENMP
    SweepTallies& t = partial[static_cast<std::size_t>(omp_get_thread_num())];
    std::uint64_t& triples = triple_count[static_cast<std::size_t>(omp_get_thread_num())];
#else
    SweepTallies& t = partial[0];
    std::uint64_t& triples = triple_count[0];
#endif
    const double mu_u = static_cast<double>(__builtin_popcount(ubits)) / lut.cube;
    const double h_u = h(mu_u);
    for (std::size_t oi = 0; oi < sm.orders.size(); ++oi) {
      const auto& masks = sm.masks[oi];
      const auto& masks0 = sm.masks0[oi];
      // V iterates over all subsets of U, including empty and full.
      std::uint32_t vbits = ubits;
      while (true) {
        ++triples;
        double s1_sum = 0.0, excess = 0.0;
        double region_acc[5] = {0, 0, 0, 0, 0};
        for (int cell = 0; cell < sm.cells; ++cell) {
          const std::uint32_t um = masks[cell] & ubits;
          if (um == 0) continue;  // empty slice contributes nothing and checks trivially
          const std::uint32_t cu = static_cast<std::uint32_t>(__builtin_popcount(um));
          const std::uint32_t cu0 = static_cast<std::uint32_t>(__builtin_popcount(masks0[cell] & ubits));
          const std::uint32_t cv = static_cast<std::uint32_t>(__builtin_popcount(masks[cell] & vbits));
          const std::uint32_t cv0 = static_cast<std::uint32_t>(__builtin_popcount(masks0[cell] & vbits));
          const int level = sm.level_of[cell];
          FastCell fc;
          fc.fill(cu, cu0, cv, cv0, level, lut);
          const double weight = std::ldexp(1.0, -level);

          t.delta_alt.check(std::fabs(fc.dU - fc.dU_alt), 0.0);
          t.s1_nonneg.check(-fc.s1, 0.0);
          t.s1_closed.check(std::fabs(fc.s1 - fc.s1_closed), 0.0);
          {
            const double gap = std::fabs(fc.hU - kLog2);
            const double sq = (fc.eU0_over - 0.5) * (fc.eU0_over - 0.5);
            t.hquad.check(2.0 * sq, gap);
            t.hquad.check(gap, 8.0 * sq);
          }
          if (cv > 0 && fc.ratio >= 0.1 && fc.ratio <= 0.9) {
            const double gap = fc.eU0_over - fc.eV0_over;
            t.s1_lower.check(2.0 * 0.1 * fc.eU * gap * gap, std::fabs(fc.s1));
          } else {
            t.s1_lower.skip();
          }
          if (fc.eU <= 0.25) {
            const double mid = fc.dU - fc.eU * (kLog2 - fc.hU);
            t.delta_approx.check(-mid, 0.0);
            t.delta_approx.check(mid, 16.0 * fc.eU * fc.dU);
          } else {
            t.delta_approx.skip();
          }
          t.s3.check(std::fabs(fc.s3), 16.0 * (fc.eU * fc.dU + fc.eV * fc.dV));
          if (cv > 0 && fc.ratio >= kap.k1 && fc.ratio <= 1.0 - kap.k1) {
            const double s1c = fc.s1 > 0.0 ? fc.s1 : 0.0;
            const double rhs = -8.0 / std::sqrt(kap.k1) * std::log(kap.k2)
                                 * (std::sqrt(fc.dU * s1c) + std::sqrt(fc.dV * s1c))
                             + 4.0 * h(2.0 * kap.k2 / kap.k1) * fc.dU;
            t.s2.check(std::fabs(fc.s2), rhs);
          } else {
            t.s2.skip();
          }
          s1_sum += weight * fc.s1;
          excess += weight * fc.r;
          int region;
          if (fc.dV - fc.ratio * fc.dU < 0.0) region = 1;
          else if (fc.eU > kap.k0) region = 2;
          else if (fc.ratio < kap.k1) region = 3;
          else if (fc.ratio > 1.0 - kap.k1) region = 4;
          else region = 5;
          region_acc[region - 1] += weight * fc.r;
        }
        const double mu_v = static_cast<double>(__builtin_popcount(vbits)) / lut.cube;
        run_triple_regions(mu_u, mu_v, h_u, kap, region_acc, excess, s1_sum, &t);
        if (vbits == 0) break;
        vbits = (vbits - 1) & ubits;
      }
    }
  }

  SweepTallies total;
  for (const auto& p : partial) total.merge(p);
  SweepReport rep;
  rep.n = n;
  rep.exhaustive = true;
  for (auto c : triple_count) rep.triples += c;
  total.to_report(&rep);
  return rep;
}

SweepReport sweep_random(int n, std::uint64_t triples, std::uint64_t seed, int threads) {
  const RegionKappas kap = kSweepKappas;
  const int nthreads = resolve_threads(threads);
  std::vector<SweepTallies> partial(static_cast<std::size_t>(nthreads));

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) num_threads(nthreads)
#endif
  for (std::int64_t ti = 0; ti < static_cast<std::int64_t>(triples); ++ti) {
#ifdef _OPENMP
    SweepTallies& t = partial[static_cast<std::size_t>(omp_get_thread_num())];
#else
    SweepTallies& t = partial[0];
#endif
    Rng rng(key_of({seed, 0xb0a2d5ull, static_cast<std::uint64_t>(ti)}));
    const int exponent = 2 + static_cast<int>(ti % static_cast<std::int64_t>(std::max(1, n - 3)));
    const double density = std::ldexp(1.0, -exponent);
    CubeSubset u = CubeSubset::random(n, density, rng);
    if (u.size() == 0) u.set(static_cast<std::uint32_t>(rng.next_below(u.cube_size())), true);
    const CubeSubset v = u.thin(0.5, rng);
    const LinearOrder ord = sample_uniform_order(n, rng.next());

    double s1_sum = 0.0, excess = 0.0;
    double region_acc[5] = {0, 0, 0, 0, 0};
    for_each_level(u, &v, ord, [&](const LevelSlices& lv) {
      const double weight = std::ldexp(1.0, -lv.level);
      const std::size_t slices = std::size_t{1} << lv.level;
      for (std::size_t s = 0; s < slices; ++s) {
        if (lv.cnt_u[s] == 0) continue;
        Cell c;
        c.fill(lv.cnt_u[s], lv.cnt_u0[s], lv.cnt_v[s], lv.cnt_v0[s], lv.slice_points);
        const double alt = delta_alternate(
            ConditionalDensities{c.eU, c.eU0, c.eU1});
        run_cell(c, alt, weight, kap, 0.1, &t, &s1_sum, &excess, region_acc);
      }
    });
    run_triple_regions(measure(u), measure(v), subset_entropy(u), kap, region_acc, excess,
                       s1_sum, &t);
    // dual-route excess check through the materialized fields on a sample
    if (n <= kMaxFieldCoords && ti % 97 == 0) {
      const EsmField fu = esm_field(u, ord);
      const EsmField fv = esm_field(v, ord);
      const PairMasses pm = pair_masses(fu, fv);
      t.pair_route.check(std::fabs((pm.union_ - field_mass(fu)) - excess), 0.0);
    }
  }

  SweepTallies total;
  for (const auto& p : partial) total.merge(p);
  SweepReport rep;
  rep.n = n;
  rep.triples = triples;
  total.to_report(&rep);
  return rep;
}

RateTable excess_rate_experiment(int n, const std::vector<double>& densities, int trials,
                                 std::uint64_t seed, int threads) {
  RateTable table;
  const int nthreads = resolve_threads(threads);
  for (std::size_t di = 0; di < densities.size(); ++di) {
    const double mu = densities[di];
    std::vector<double> rel(static_cast<std::size_t>(trials), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
#endif
    for (int ti = 0; ti < trials; ++ti) {
      Rng rng(key_of({seed, 0xa7e5ull, static_cast<std::uint64_t>(di), static_cast<std::uint64_t>(ti)}));
      CubeSubset u = CubeSubset::random(n, mu, rng);
      if (u.size() == 0) u.set(static_cast<std::uint32_t>(rng.next_below(u.cube_size())), true);
      const CubeSubset v = u.thin(0.5, rng);
      const LinearOrder ord = sample_uniform_order(n, rng.next());
      const double mass = field_mass(u, ord);
      rel[static_cast<std::size_t>(ti)] = mass > 0.0 ? union_excess(u, v, ord) / mass : 0.0;
    }
    double mean = 0.0;
    for (double x : rel) mean += x;
    mean /= trials;
    double var = 0.0;
    for (double x : rel) var += (x - mean) * (x - mean);
    const double sd = trials > 1 ? std::sqrt(var / (trials - 1)) : 0.0;
    table.rows.push_back({mu, mean, sd, 0.0});
  }
  // least-squares fit of excess_mean = C * log|log mu| / |log mu|^{1/3}
  double num = 0.0, den = 0.0;
  for (const auto& row : table.rows) {
    const double l = -std::log(row.mu);
    const double g = std::log(l) / std::cbrt(l);
    num += row.excess_mean * g;
    den += g * g;
  }
  table.c_fit = den > 0.0 ? num / den : 0.0;
  for (auto& row : table.rows) {
    const double l = -std::log(row.mu);
    row.bound = table.c_fit * std::log(l) / std::cbrt(l);
  }
  return table;
}

double proj_distance(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size()) throw std::invalid_argument("proj_distance: length mismatch");
  double nu = 0.0, nv = 0.0;
  for (double x : u) nu += x * x;
  for (double x : v) nv += x * x;
  if (nu == 0.0 || nv == 0.0) throw std::invalid_argument("proj_distance: zero vector");
  double wedge = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = i + 1; j < u.size(); ++j) {
      const double m = u[i] * v[j] - u[j] * v[i];
      wedge += m * m;
    }
  return std::sqrt(wedge) / std::sqrt(nu * nv);
}

ProjReport check_proj_lemmas(const std::vector<double>& u, const std::vector<double>& v) {
  const std::size_t n = u.size();
  ProjReport rep;
  rep.distance = proj_distance(u, v);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::vector<double> ui{u[i], u[j]}, vi{v[i], v[j]};
      const double nui = ui[0] * ui[0] + ui[1] * ui[1];
      const double nvi = vi[0] * vi[0] + vi[1] * vi[1];
      if (nui == 0.0 || nvi == 0.0) continue;  // degenerate pair carries no constraint
      rep.max_pair_distance = std::max(rep.max_pair_distance, proj_distance(ui, vi));
    }
  rep.pair_bound_ok = rep.distance <= (static_cast<double>(n) - 1.0) * rep.max_pair_distance + kTol;

  double uv = 0.0, vv = 0.0, uinf = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    uv += u[i] * v[i];
    vv += v[i] * v[i];
    uinf = std::max(uinf, std::fabs(u[i]));
  }
  rep.lambda = uv / vv;
  double rinf = 0.0;
  for (std::size_t i = 0; i < n; ++i) rinf = std::max(rinf, std::fabs(u[i] - rep.lambda * v[i]));
  rep.ratio = rinf / uinf;
  const double c = static_cast<double>(n);
  rep.norm_lower_ok = rep.ratio >= rep.distance / c - kTol;
  rep.norm_upper_ok = rep.ratio <= c * rep.distance + kTol;
  return rep;
}

ProjSweep proj_sweep(int dim_lo, int dim_hi, std::uint64_t draws, std::uint64_t seed) {
  ProjSweep sw;
  Rng rng(key_of({seed, 0x9c03ull}));
  for (std::uint64_t k = 0; k < draws; ++k) {
    const int dim = dim_lo + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(dim_hi - dim_lo + 1)));
    std::vector<double> u(static_cast<std::size_t>(dim)), v(static_cast<std::size_t>(dim));
    for (auto& x : u) x = rng.next_unit() + 1e-3;
    for (auto& x : v) x = rng.next_unit() + 1e-3;
    const ProjReport rep = check_proj_lemmas(u, v);
    ++sw.checked;
    if (!rep.ok()) ++sw.violated;
    if (rep.distance > 0.0)
      sw.max_ratio_over_bound = std::max(sw.max_ratio_over_bound, rep.ratio / (dim * rep.distance));
  }
  return sw;
}

}  // namespace esmlab::bounds
