#include "esmlab/groups.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <unordered_map>

#include "esmlab/rng.hpp"

namespace esmlab::groups {

namespace {

int checked_rank(int d) {
  if (d < 1 || d > 8) throw std::invalid_argument("group rank must be in [1,8]");
  return d;
}

}  // namespace

GroupSpec GroupSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("group spec: expected kind:rank");
  const std::string kind = text.substr(0, colon);
  const int rank = checked_rank(std::atoi(text.c_str() + colon + 1));
  if (kind == "free") return {Kind::kFree, rank};
  if (kind == "zd") return {Kind::kFreeAbelian, rank};
  throw std::invalid_argument("group spec: unknown kind '" + kind + "'");
}

std::string GroupSpec::to_string() const {
  return (kind == Kind::kFree ? "free:" : "zd:") + std::to_string(rank);
}

GroupElement::GroupElement(GroupSpec spec, std::vector<int> data)
    : spec_(spec), data_(std::move(data)) {
  if (spec_.kind == Kind::kFreeAbelian) {
    if (static_cast<int>(data_.size()) != spec_.rank)
      throw std::invalid_argument("GroupElement: Z^d vector has wrong length");
  } else {
    for (std::size_t k = 0; k < data_.size(); ++k) {
      const int g = data_[k];
      if (g == 0 || std::abs(g) > spec_.rank)
        throw std::invalid_argument("GroupElement: generator code out of range");
      if (k > 0 && data_[k - 1] == -g)
        throw std::invalid_argument("GroupElement: word is not reduced");
    }
  }
}

GroupElement GroupElement::identity(const GroupSpec& spec) {
  return spec.kind == Kind::kFreeAbelian
             ? GroupElement(spec, std::vector<int>(static_cast<std::size_t>(spec.rank), 0))
             : GroupElement(spec, {});
}

GroupElement GroupElement::generator(const GroupSpec& spec, int sym_index) {
  if (sym_index < 0 || sym_index >= spec.generator_count())
    throw std::invalid_argument("generator index out of range");
  const int g = sym_index / 2 + 1;
  const int signed_g = (sym_index % 2 == 0) ? g : -g;
  if (spec.kind == Kind::kFree) return GroupElement(spec, {signed_g});
  std::vector<int> vec(static_cast<std::size_t>(spec.rank), 0);
  vec[static_cast<std::size_t>(g - 1)] = signed_g > 0 ? 1 : -1;
  return GroupElement(spec, std::move(vec));
}

GroupElement GroupElement::from_word(const GroupSpec& spec, const std::string& word) {
  GroupElement out = identity(spec);
  std::size_t k = 0;
  while (k < word.size()) {
    const char c = word[k];
    int g;
    if (c >= 'a' && c < 'a' + spec.rank) g = c - 'a' + 1;
    else if (c >= 'A' && c < 'A' + spec.rank) g = -(c - 'A' + 1);
    else if (c == 'e' && word.size() == 1) return out;
    else throw std::invalid_argument("from_word: bad letter in '" + word + "'");
    ++k;
    int reps = 0;
    while (k < word.size() && word[k] >= '0' && word[k] <= '9') {
      reps = reps * 10 + (word[k] - '0');
      ++k;
    }
    if (reps == 0) reps = 1;
    const int sym = (g > 0 ? (g - 1) * 2 : (-g - 1) * 2 + 1);
    for (int t = 0; t < reps; ++t) out = out * generator(spec, sym);
  }
  return out;
}

bool GroupElement::is_identity() const {
  if (spec_.kind == Kind::kFree) return data_.empty();
  return std::all_of(data_.begin(), data_.end(), [](int x) { return x == 0; });
}

int GroupElement::word_length() const {
  if (spec_.kind == Kind::kFree) return static_cast<int>(data_.size());
  int len = 0;
  for (int x : data_) len += std::abs(x);
  return len;
}

GroupElement GroupElement::operator*(const GroupElement& o) const {
  if (!(spec_ == o.spec_)) throw std::invalid_argument("GroupElement: spec mismatch");
  if (spec_.kind == Kind::kFreeAbelian) {
    std::vector<int> vec(data_);
    for (std::size_t k = 0; k < vec.size(); ++k) vec[k] += o.data_[k];
    return GroupElement(spec_, std::move(vec));
  }
  std::vector<int> word(data_);
  for (int g : o.data_) {
    if (!word.empty() && word.back() == -g) word.pop_back();
    else word.push_back(g);
  }
  return GroupElement(spec_, std::move(word));
}

GroupElement GroupElement::inverse() const {
  if (spec_.kind == Kind::kFreeAbelian) {
    std::vector<int> vec(data_);
    for (auto& x : vec) x = -x;
    return GroupElement(spec_, std::move(vec));
  }
  std::vector<int> word(data_.rbegin(), data_.rend());
  for (auto& g : word) g = -g;
  return GroupElement(spec_, std::move(word));
}

bool GroupElement::operator<(const GroupElement& o) const {
  const int la = word_length(), lb = o.word_length();
  if (la != lb) return la < lb;
  return data_ < o.data_;
}

std::uint64_t GroupElement::hash() const {
  std::uint64_t k = spec_.kind == Kind::kFree ? 0x66726565ull : 0x7a645full;
  k = mix64(k ^ static_cast<std::uint64_t>(spec_.rank));
  for (int x : data_) k = mix64(k ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(x)) * 0x9e3779b97f4a7c15ull);
  k = mix64(k ^ static_cast<std::uint64_t>(data_.size()));
  return k;
}

std::string GroupElement::to_string() const {
  if (spec_.kind == Kind::kFreeAbelian) {
    std::string s = "(";
    for (std::size_t k = 0; k < data_.size(); ++k) {
      if (k) s += ",";
      s += std::to_string(data_[k]);
    }
    return s + ")";
  }
  if (data_.empty()) return "e";
  std::string s;
  std::size_t k = 0;
  while (k < data_.size()) {
    const int g = data_[k];
    std::size_t run = k;
    while (run < data_.size() && data_[run] == g) ++run;
    s += static_cast<char>(g > 0 ? 'a' + g - 1 : 'A' - g - 1);
    if (run - k > 1) s += std::to_string(run - k);
    k = run;
  }
  return s;
}

std::uint64_t free_ball_size(int d, int radius) {
  if (radius == 0) return 1;
  if (d == 1) return 2ull * static_cast<std::uint64_t>(radius) + 1;
  std::uint64_t sphere = 2ull * static_cast<std::uint64_t>(d);
  std::uint64_t total = 1 + sphere;
  for (int r = 2; r <= radius; ++r) {
    sphere *= 2ull * static_cast<std::uint64_t>(d) - 1;
    total += sphere;
  }
  return total;
}

std::uint64_t zd_ball_size(int d, int radius) {
  // sum over k of C(d,k) 2^k C(radius, k) ... computed by dynamic programming
  std::vector<std::uint64_t> cur(static_cast<std::size_t>(radius) + 1, 1);  // d = 0: 1 point any radius
  for (int dim = 1; dim <= d; ++dim) {
    std::vector<std::uint64_t> nxt(static_cast<std::size_t>(radius) + 1, 0);
    for (int r = 0; r <= radius; ++r) {
      nxt[static_cast<std::size_t>(r)] = cur[static_cast<std::size_t>(r)];  // coordinate 0
      for (int step = 1; step <= r; ++step)
        nxt[static_cast<std::size_t>(r)] += 2 * cur[static_cast<std::size_t>(r - step)];
    }
    cur = std::move(nxt);
  }
  return cur[static_cast<std::size_t>(radius)];
}

CayleyBall::CayleyBall(const GroupSpec& spec, int radius) : spec_(spec), radius_(radius) {
  if (radius < 0) throw std::invalid_argument("CayleyBall: negative radius");
  const std::uint64_t predicted = spec.kind == Kind::kFree ? free_ball_size(spec.rank, radius)
                                                           : zd_ball_size(spec.rank, radius);
  if (predicted > kBallBudget)
    throw std::invalid_argument("CayleyBall: ball of " + std::to_string(predicted) +
                                " vertices exceeds the budget");
  vertices_.push_back(GroupElement::identity(spec));
  distance_.push_back(0);

  // BFS by radius shells; generators are tried in symmetric order so the
  // vertex list is identical across runs.
  std::unordered_map<std::uint64_t, std::vector<std::int64_t>> lookup;
  lookup[vertices_[0].hash()].push_back(0);
  auto seen = [&](const GroupElement& g) {
    const auto it = lookup.find(g.hash());
    if (it == lookup.end()) return false;
    for (std::int64_t idx : it->second)
      if (vertices_[static_cast<std::size_t>(idx)] == g) return true;
    return false;
  };
  std::size_t shell_begin = 0;
  for (int r = 1; r <= radius; ++r) {
    const std::size_t shell_end = vertices_.size();
    for (std::size_t vi = shell_begin; vi < shell_end; ++vi) {
      for (int j = 0; j < spec.generator_count(); ++j) {
        GroupElement g = vertices_[vi] * GroupElement::generator(spec, j);
        if (g.word_length() != r || seen(g)) continue;
        lookup[g.hash()].push_back(static_cast<std::int64_t>(vertices_.size()));
        vertices_.push_back(std::move(g));
        distance_.push_back(r);
      }
    }
    shell_begin = shell_end;
  }
  index_.reserve(vertices_.size());
  for (std::size_t k = 0; k < vertices_.size(); ++k)
    index_.emplace_back(vertices_[k].hash(), static_cast<std::int64_t>(k));
  std::sort(index_.begin(), index_.end());

  adjacency_.assign(vertices_.size() * static_cast<std::size_t>(spec.generator_count()), -1);
  for (std::size_t vi = 0; vi < vertices_.size(); ++vi)
    for (int j = 0; j < spec.generator_count(); ++j)
      adjacency_[vi * static_cast<std::size_t>(spec.generator_count()) + static_cast<std::size_t>(j)] =
          index_of(vertices_[vi] * GroupElement::generator(spec, j));
}

std::int64_t CayleyBall::index_of(const GroupElement& g) const {
  const std::uint64_t hsh = g.hash();
  auto it = std::lower_bound(index_.begin(), index_.end(), std::make_pair(hsh, std::int64_t{-1}));
  for (; it != index_.end() && it->first == hsh; ++it)
    if (vertices_[static_cast<std::size_t>(it->second)] == g) return it->second;
  return -1;
}

std::size_t CayleyBall::count_within(int dist) const {
  std::size_t c = 0;
  while (c < distance_.size() && distance_[c] <= dist) ++c;
  return c;
}

}  // namespace esmlab::groups
