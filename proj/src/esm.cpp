#include "esmlab/esm.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "esmlab/entropy.hpp"

namespace esmlab {

namespace {

struct Kahan {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

struct CountPair {
  std::vector<std::uint32_t> cnt, cnt0;
};

// Walks the revelation levels of one or more subsets over a shared order.
// Slice ids are built incrementally per member, so a full walk costs
// O(n * (sum of member counts)) plus the table allocations.
class LevelWalker {
 public:
  LevelWalker(const std::vector<const CubeSubset*>& sets, const LinearOrder& ord)
      : ord_(ord), n_(ord.n()), tables_(sets.size()) {
    members_.resize(sets.size());
    sids_.resize(sets.size());
    for (std::size_t s = 0; s < sets.size(); ++s) {
      members_[s].reserve(sets[s]->size());
      sets[s]->for_each_member([&](std::uint32_t w) { members_[s].push_back(w); });
      sids_[s].assign(members_[s].size(), 0);
    }
  }

  template <typename F>
  void run(F&& f) {
    for (int p = 0; p < n_; ++p) {
      const int coord = ord_.coord_at(p);
      const std::size_t slices = std::size_t{1} << p;
      for (std::size_t s = 0; s < tables_.size(); ++s) {
        auto& t = tables_[s];
        t.cnt.assign(slices, 0);
        t.cnt0.assign(slices, 0);
        const auto& mem = members_[s];
        auto& sid = sids_[s];
        if (p > 0) {
          const int prev = ord_.coord_at(p - 1);
          for (std::size_t k = 0; k < mem.size(); ++k)
            sid[k] |= ((mem[k] >> prev) & 1u) << (p - 1);
        }
        for (std::size_t k = 0; k < mem.size(); ++k) {
          ++t.cnt[sid[k]];
          if (!((mem[k] >> coord) & 1u)) ++t.cnt0[sid[k]];
        }
      }
      f(p, std::uint64_t{1} << (n_ - p), tables_);
    }
  }

 private:
  const LinearOrder& ord_;
  int n_;
  std::vector<CountPair> tables_;
  std::vector<std::vector<std::uint32_t>> members_;
  std::vector<std::vector<std::uint32_t>> sids_;
};

std::uint32_t slice_count_at(const CubeSubset& u, std::uint32_t prefix_mask, std::uint32_t w,
                             std::uint32_t coord_bit, std::uint32_t* cnt0) {
  std::uint32_t cnt = 0, c0 = 0;
  u.for_each_member([&](std::uint32_t x) {
    if (((x ^ w) & prefix_mask) == 0) {
      ++cnt;
      if (!(x & coord_bit)) ++c0;
    }
  });
  *cnt0 = c0;
  return cnt;
}

void require_same_shape(const CubeSubset& u, const CubeSubset& v) {
  if (u.n() != v.n()) throw std::invalid_argument("subset dimensions differ");
}

}  // namespace

double slice_delta(std::uint32_t cnt, std::uint32_t cnt0, std::uint64_t slice_points) {
  const double inv = 1.0 / static_cast<double>(slice_points);
  const double e = cnt * inv;
  const double e0 = cnt0 * inv;
  const double e1 = (cnt - cnt0) * inv;
  return h(e) - 0.5 * h(2.0 * e0) - 0.5 * h(2.0 * e1);
}

ConditionalDensities conditional_densities(const CubeSubset& u, const LinearOrder& ord,
                                           std::uint32_t w, int i) {
  if (i < 0 || i >= u.n()) throw std::invalid_argument("coordinate out of range");
  const int p = ord.rank(i);
  const std::uint32_t mask = ord.prefix_mask(p);
  std::uint32_t cnt0 = 0;
  const std::uint32_t cnt = slice_count_at(u, mask, w, std::uint32_t{1} << i, &cnt0);
  const double inv = 1.0 / static_cast<double>(std::uint64_t{1} << (u.n() - p));
  return {cnt * inv, cnt0 * inv, (cnt - cnt0) * inv};
}

double delta(const CubeSubset& u, const LinearOrder& ord, std::uint32_t w, int i) {
  const ConditionalDensities d = conditional_densities(u, ord, w, i);
  return h(d.eps) - 0.5 * h(2.0 * d.eps0) - 0.5 * h(2.0 * d.eps1);
}

double delta_alternate(const ConditionalDensities& d) {
  double out = 0.0;
  if (d.eps > 0.0) out += d.eps * (h(0.5) - h(d.eps0 / d.eps));
  if (d.eps < 1.0) out += (1.0 - d.eps) * (h(0.5) - h((0.5 - d.eps0) / (1.0 - d.eps)));
  return out;
}

double delta_alternate(const CubeSubset& u, const LinearOrder& ord, std::uint32_t w, int i) {
  return delta_alternate(conditional_densities(u, ord, w, i));
}

EsmField::EsmField(int n, LinearOrder order, double source_measure, std::vector<double> heights)
    : n_(n), order_(std::move(order)), source_measure_(source_measure),
      heights_(std::move(heights)) {}

EsmField esm_field(const CubeSubset& u, const LinearOrder& ord) {
  if (u.n() != ord.n()) throw std::invalid_argument("esm_field: order dimension mismatch");
  if (u.n() > kMaxFieldCoords)
    throw std::invalid_argument("esm_field: materialized fields capped at n=16; use the streaming routines");
  const int n = u.n();
  std::vector<double> heights(static_cast<std::size_t>(n) << n, 0.0);

  std::vector<std::uint32_t> members;
  members.reserve(u.size());
  u.for_each_member([&](std::uint32_t w) { members.push_back(w); });
  std::vector<std::uint32_t> sid(members.size(), 0);
  std::vector<double> height_of_slice;

  for (int p = 0; p < n; ++p) {
    const int coord = ord.coord_at(p);
    const std::size_t slices = std::size_t{1} << p;
    std::vector<std::uint32_t> cnt(slices, 0), cnt0(slices, 0);
    if (p > 0) {
      const int prev = ord.coord_at(p - 1);
      for (std::size_t k = 0; k < members.size(); ++k)
        sid[k] |= ((members[k] >> prev) & 1u) << (p - 1);
    }
    for (std::size_t k = 0; k < members.size(); ++k) {
      ++cnt[sid[k]];
      if (!((members[k] >> coord) & 1u)) ++cnt0[sid[k]];
    }
    const std::uint64_t pts = std::uint64_t{1} << (n - p);
    height_of_slice.assign(slices, 0.0);
    for (std::size_t s = 0; s < slices; ++s)
      if (cnt[s] > 0)
        height_of_slice[s] = slice_delta(cnt[s], cnt0[s], pts) / slice_eps(cnt[s], pts);
    double* plane = heights.data() + (static_cast<std::size_t>(coord) << n);
    for (std::size_t k = 0; k < members.size(); ++k)
      plane[members[k]] = height_of_slice[sid[k]];
  }
  return EsmField(n, ord, measure(u), std::move(heights));
}

double field_mass(const EsmField& f) {
  Kahan acc;
  for (double x : f.heights()) acc.add(x);
  return acc.sum / static_cast<double>(std::uint64_t{1} << f.n());
}

double field_mass(const CubeSubset& u, const LinearOrder& ord) {
  if (u.n() != ord.n()) throw std::invalid_argument("field_mass: order dimension mismatch");
  Kahan acc;
  LevelWalker walker({&u}, ord);
  walker.run([&](int p, std::uint64_t pts, const std::vector<CountPair>& t) {
    const double scale = std::ldexp(1.0, -p);
    const auto& cnt = t[0].cnt;
    const auto& cnt0 = t[0].cnt0;
    for (std::size_t s = 0; s < cnt.size(); ++s)
      if (cnt[s] > 0) acc.add(scale * slice_delta(cnt[s], cnt0[s], pts));
  });
  return acc.sum;
}

PairMasses pair_masses(const EsmField& fu, const EsmField& fv) {
  if (fu.n() != fv.n() || !(fu.order() == fv.order()))
    throw std::invalid_argument("pair_masses: fields must share n and order");
  Kahan inter, uni, sym;
  const auto& a = fu.heights();
  const auto& b = fv.heights();
  for (std::size_t k = 0; k < a.size(); ++k) {
    inter.add(std::min(a[k], b[k]));
    uni.add(std::max(a[k], b[k]));
    sym.add(std::fabs(a[k] - b[k]));
  }
  const double scale = std::ldexp(1.0, -fu.n());
  return {inter.sum * scale, uni.sum * scale, sym.sum * scale};
}

PairMasses pair_masses(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord) {
  require_same_shape(u, v);
  if (u.n() != ord.n()) throw std::invalid_argument("pair_masses: order dimension mismatch");
  const CubeSubset both = u.intersect(v);
  Kahan inter, uni, sym;
  LevelWalker walker({&u, &v, &both}, ord);
  walker.run([&](int p, std::uint64_t pts, const std::vector<CountPair>& t) {
    const auto& cu = t[0].cnt;
    const auto& cv = t[1].cnt;
    const auto& cb = t[2].cnt;
    for (std::size_t s = 0; s < cu.size(); ++s) {
      if (cu[s] == 0 && cv[s] == 0) continue;
      const double au = cu[s] ? slice_delta(cu[s], t[0].cnt0[s], pts) / slice_eps(cu[s], pts) : 0.0;
      const double av = cv[s] ? slice_delta(cv[s], t[1].cnt0[s], pts) / slice_eps(cv[s], pts) : 0.0;
      const double n_both = cb[s];
      const double n_uonly = cu[s] - cb[s];
      const double n_vonly = cv[s] - cb[s];
      inter.add(n_both * std::min(au, av));
      uni.add(n_both * std::max(au, av) + n_uonly * au + n_vonly * av);
      sym.add(n_both * std::fabs(au - av) + n_uonly * au + n_vonly * av);
    }
  });
  const double scale = std::ldexp(1.0, -u.n());
  return {inter.sum * scale, uni.sum * scale, sym.sum * scale};
}

double union_excess(const CubeSubset& u, const CubeSubset& v, const LinearOrder& ord) {
  require_same_shape(u, v);
  if (!v.subset_of(u)) throw std::invalid_argument("union_excess: V must be contained in U");
  Kahan acc;
  LevelWalker walker({&u, &v}, ord);
  walker.run([&](int p, std::uint64_t pts, const std::vector<CountPair>& t) {
    const double scale = std::ldexp(1.0, -p);
    const auto& cu = t[0].cnt;
    const auto& cv = t[1].cnt;
    for (std::size_t s = 0; s < cu.size(); ++s) {
      if (cu[s] == 0 || cv[s] == 0) continue;
      const double du = slice_delta(cu[s], t[0].cnt0[s], pts);
      const double dv = slice_delta(cv[s], t[1].cnt0[s], pts);
      const double ratio = static_cast<double>(cv[s]) / static_cast<double>(cu[s]);
      const double r = dv - ratio * du;
      if (r > 0.0) acc.add(scale * r);
    }
  });
  return acc.sum;
}

double check_equivariance(const CubeSubset& u, const LinearOrder& ord, const CoordPermutation& sigma) {
  const EsmField base = esm_field(u, ord);
  const EsmField mapped = esm_field(u.permute(sigma), sigma.apply(ord));
  double worst = 0.0;
  const int n = u.n();
  for (std::uint32_t w = 0; w < (std::uint32_t{1} << n); ++w) {
    const std::uint32_t sw = sigma.apply(w);
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, std::fabs(mapped.at(sw, sigma(i)) - base.at(w, i)));
  }
  return worst;
}

void for_each_level(const CubeSubset& u, const CubeSubset* v, const LinearOrder& ord,
                    const std::function<void(const LevelSlices&)>& f) {
  std::vector<const CubeSubset*> sets{&u};
  if (v) {
    require_same_shape(u, *v);
    sets.push_back(v);
  }
  LevelWalker walker(sets, ord);
  walker.run([&](int p, std::uint64_t pts, const std::vector<CountPair>& t) {
    LevelSlices view;
    view.level = p;
    view.slice_points = pts;
    view.cnt_u = t[0].cnt.data();
    view.cnt_u0 = t[0].cnt0.data();
    if (t.size() > 1) {
      view.cnt_v = t[1].cnt.data();
      view.cnt_v0 = t[1].cnt0.data();
    }
    f(view);
  });
}

}  // namespace esmlab
