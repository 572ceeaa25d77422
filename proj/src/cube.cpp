#include "esmlab/cube.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace esmlab {

namespace {

void check_n(int n) {
  if (n < 1 || n > kMaxCoords)
    throw std::invalid_argument("coordinate count must be in [1," + std::to_string(kMaxCoords) + "]");
}

}  // namespace

BitWord::BitWord(int n_arg, std::uint32_t bits_arg) : n(n_arg), bits(bits_arg) {
  check_n(n);
  if (n < 32 && bits >= (std::uint32_t{1} << n))
    throw std::invalid_argument("BitWord: bits out of range for n");
}

LinearOrder::LinearOrder(std::vector<int> rank) : rank_(std::move(rank)) {
  const int n = static_cast<int>(rank_.size());
  check_n(n);
  coord_at_.assign(n, -1);
  for (int c = 0; c < n; ++c) {
    const int r = rank_[c];
    if (r < 0 || r >= n || coord_at_[r] != -1)
      throw std::invalid_argument("LinearOrder: rank is not a permutation");
    coord_at_[r] = c;
  }
}

LinearOrder LinearOrder::natural(int n) {
  std::vector<int> rank(n);
  std::iota(rank.begin(), rank.end(), 0);
  return LinearOrder(std::move(rank));
}

std::uint32_t LinearOrder::prefix_mask(int position) const {
  std::uint32_t m = 0;
  for (int j = 0; j < position; ++j) m |= std::uint32_t{1} << coord_at_[j];
  return m;
}

LinearOrder sample_uniform_order(int n, std::uint64_t seed) {
  check_n(n);
  std::vector<int> coord_at(n);
  std::iota(coord_at.begin(), coord_at.end(), 0);
  Rng rng(key_of({seed, 0x04de4ull}));
  for (int i = n - 1; i > 0; --i)
    std::swap(coord_at[i], coord_at[rng.next_below(static_cast<std::uint64_t>(i) + 1)]);
  std::vector<int> rank(n);
  for (int p = 0; p < n; ++p) rank[coord_at[p]] = p;
  return LinearOrder(std::move(rank));
}

CoordPermutation::CoordPermutation(std::vector<int> image) : image_(std::move(image)) {
  const int n = static_cast<int>(image_.size());
  check_n(n);
  std::vector<bool> seen(n, false);
  for (int i : image_) {
    if (i < 0 || i >= n || seen[i]) throw std::invalid_argument("CoordPermutation: not a bijection");
    seen[i] = true;
  }
}

CoordPermutation CoordPermutation::identity(int n) {
  std::vector<int> img(n);
  std::iota(img.begin(), img.end(), 0);
  return CoordPermutation(std::move(img));
}

std::uint32_t CoordPermutation::apply(std::uint32_t word) const {
  std::uint32_t out = 0;
  for (int i = 0; i < n(); ++i)
    out |= ((word >> i) & 1u) << image_[i];
  return out;
}

LinearOrder CoordPermutation::apply(const LinearOrder& ord) const {
  // rank_new(sigma(i)) = rank_old(i)
  std::vector<int> rank(ord.n());
  for (int i = 0; i < ord.n(); ++i) rank[image_[i]] = ord.rank(i);
  return LinearOrder(std::move(rank));
}

CoordPermutation sample_uniform_permutation(int n, std::uint64_t seed) {
  const LinearOrder ord = sample_uniform_order(n, key_of({seed, 0x51d3ull}));
  std::vector<int> img(n);
  for (int i = 0; i < n; ++i) img[i] = ord.rank(i);
  return CoordPermutation(std::move(img));
}

CubeSubset::CubeSubset(int n) : n_(n) {
  check_n(n);
  bits_.assign(((std::size_t{1} << n) + 63) / 64, 0);
}

CubeSubset CubeSubset::full(int n) {
  CubeSubset u(n);
  const std::uint64_t total = u.cube_size();
  for (std::size_t i = 0; i < u.bits_.size(); ++i) u.bits_[i] = ~std::uint64_t{0};
  const int tail = static_cast<int>(total & 63);
  if (tail) u.bits_.back() = (std::uint64_t{1} << tail) - 1;
  u.count_ = total;
  return u;
}

CubeSubset CubeSubset::cylinder(int n, int coord, int value) {
  CubeSubset u(n);
  for (std::uint32_t w = 0; w < u.cube_size(); ++w)
    if (static_cast<int>((w >> coord) & 1u) == value) u.set(w, true);
  return u;
}

CubeSubset CubeSubset::of_points(int n, const std::vector<std::uint32_t>& points) {
  CubeSubset u(n);
  for (auto w : points) u.set(w, true);
  return u;
}

CubeSubset CubeSubset::random(int n, double density, Rng& rng) {
  CubeSubset u(n);
  for (std::uint32_t w = 0; w < u.cube_size(); ++w)
    if (rng.next_unit() < density) u.set(w, true);
  return u;
}

void CubeSubset::set(std::uint32_t w, bool member) {
  const std::uint64_t mask = std::uint64_t{1} << (w & 63);
  std::uint64_t& blk = bits_[w >> 6];
  if (member && !(blk & mask)) { blk |= mask; ++count_; }
  else if (!member && (blk & mask)) { blk &= ~mask; --count_; }
}

CubeSubset CubeSubset::complement() const {
  CubeSubset out = full(n_);
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] &= ~bits_[i];
  out.count_ = cube_size() - count_;
  return out;
}

CubeSubset CubeSubset::intersect(const CubeSubset& o) const {
  if (o.n_ != n_) throw std::invalid_argument("intersect: dimension mismatch");
  CubeSubset out(n_);
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    out.bits_[i] = bits_[i] & o.bits_[i];
    c += static_cast<std::uint64_t>(__builtin_popcountll(out.bits_[i]));
  }
  out.count_ = c;
  return out;
}

bool CubeSubset::subset_of(const CubeSubset& o) const {
  if (o.n_ != n_) return false;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] & ~o.bits_[i]) return false;
  return true;
}

bool CubeSubset::disjoint_from(const CubeSubset& o) const {
  if (o.n_ != n_) return false;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] & o.bits_[i]) return false;
  return true;
}

CubeSubset CubeSubset::thin(double keep, Rng& rng) const {
  CubeSubset out(n_);
  for_each_member([&](std::uint32_t w) {
    if (rng.next_unit() < keep) out.set(w, true);
  });
  return out;
}

CubeSubset CubeSubset::permute(const CoordPermutation& sigma) const {
  CubeSubset out(n_);
  for_each_member([&](std::uint32_t w) { out.set(sigma.apply(w), true); });
  return out;
}

std::string CubeSubset::serialize() const {
  static const char* hex = "0123456789abcdef";
  std::string s = "n=" + std::to_string(n_) + ";bits=";
  const std::uint64_t nibbles = (cube_size() + 3) / 4;
  for (std::uint64_t k = 0; k < nibbles; ++k) {
    const std::uint64_t blk = bits_[(k * 4) >> 6];
    s += hex[(blk >> ((k * 4) & 63)) & 0xf];
  }
  return s;
}

CubeSubset CubeSubset::deserialize(const std::string& line) {
  if (line.rfind("n=", 0) != 0) throw std::invalid_argument("CubeSubset: expected n=<n>;bits=<hex>");
  const auto semi = line.find(";bits=");
  if (semi == std::string::npos) throw std::invalid_argument("CubeSubset: missing bits field");
  const int n = std::stoi(line.substr(2, semi - 2));
  check_n(n);
  CubeSubset u(n);
  const std::string hex = line.substr(semi + 6);
  const std::uint64_t nibbles = (u.cube_size() + 3) / 4;
  if (hex.size() != nibbles) throw std::invalid_argument("CubeSubset: bitmap length mismatch");
  for (std::uint64_t k = 0; k < nibbles; ++k) {
    const char c = hex[k];
    std::uint64_t v;
    if (c >= '0' && c <= '9') v = static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') v = static_cast<std::uint64_t>(c - 'a' + 10);
    else throw std::invalid_argument("CubeSubset: bad hex digit");
    u.bits_[(k * 4) >> 6] |= v << ((k * 4) & 63);
  }
  std::uint64_t cnt = 0;
  for (auto blk : u.bits_) cnt += static_cast<std::uint64_t>(__builtin_popcountll(blk));
  u.count_ = cnt;
  return u;
}

double measure(const CubeSubset& u) {
  return static_cast<double>(u.size()) / static_cast<double>(u.cube_size());
}

double subset_entropy(const CubeSubset& u) { return h(measure(u)); }

}  // namespace esmlab
