#pragma once

// Finite binary cubes {0,1}^n with the uniform product measure: points are
// n-bit words, subsets are bitmaps over all 2^n points, and revelation
// orders are permutations of the coordinate set.

#include <cstdint>
#include <string>
#include <vector>

#include "esmlab/entropy.hpp"
#include "esmlab/rng.hpp"

namespace esmlab {

inline constexpr int kMaxCoords = 24;  // 2^24 membership bits = 2 MB

// A point of {0,1}^n. Bit i of `bits` is coordinate w_i.
struct BitWord {
  int n = 0;
  std::uint32_t bits = 0;

  BitWord() = default;
  BitWord(int n_, std::uint32_t bits_);
};

// Permutation of {0,...,n-1}; doubles as a linear order on coordinates
// (rank[i] = position of coordinate i) and as a coordinate relabeling.
class LinearOrder {
 public:
  LinearOrder() = default;
  // `rank` must be a bijection; throws std::invalid_argument otherwise.
  explicit LinearOrder(std::vector<int> rank);

  static LinearOrder natural(int n);

  int n() const { return static_cast<int>(rank_.size()); }
  int rank(int coord) const { return rank_[coord]; }
  int coord_at(int position) const { return coord_at_[position]; }
  const std::vector<int>& ranks() const { return rank_; }

  // Bitmask of coordinates with rank < position.
  std::uint32_t prefix_mask(int position) const;

  bool operator==(const LinearOrder& o) const { return rank_ == o.rank_; }

 private:
  std::vector<int> rank_;
  std::vector<int> coord_at_;
};

// Uniform permutation by seeded Fisher-Yates; identical bytes per seed.
LinearOrder sample_uniform_order(int n, std::uint64_t seed);

// Coordinate permutation sigma acting on words, subsets and orders.
class CoordPermutation {
 public:
  explicit CoordPermutation(std::vector<int> image);  // image[i] = sigma(i)
  static CoordPermutation identity(int n);

  int n() const { return static_cast<int>(image_.size()); }
  int operator()(int coord) const { return image_[coord]; }

  std::uint32_t apply(std::uint32_t word) const;   // bit sigma(i) of result = bit i
  LinearOrder apply(const LinearOrder& ord) const; // x (sigma ord) y iff sigma^-1 x ord sigma^-1 y

 private:
  std::vector<int> image_;
};

CoordPermutation sample_uniform_permutation(int n, std::uint64_t seed);

// Measurable subset of {0,1}^n as a characteristic bitmap.
class CubeSubset {
 public:
  CubeSubset() = default;
  explicit CubeSubset(int n);

  static CubeSubset empty(int n) { return CubeSubset(n); }
  static CubeSubset full(int n);
  // Cylinder {w : w_coord = value}.
  static CubeSubset cylinder(int n, int coord, int value);
  static CubeSubset of_points(int n, const std::vector<std::uint32_t>& points);
  // Each point kept independently with probability `density`.
  static CubeSubset random(int n, double density, Rng& rng);

  int n() const { return n_; }
  std::uint64_t size() const { return count_; }
  std::uint64_t cube_size() const { return std::uint64_t{1} << n_; }
  bool contains(std::uint32_t w) const {
    return (bits_[w >> 6] >> (w & 63)) & 1;
  }
  void set(std::uint32_t w, bool member);

  CubeSubset complement() const;
  CubeSubset intersect(const CubeSubset& o) const;
  bool subset_of(const CubeSubset& o) const;
  bool disjoint_from(const CubeSubset& o) const;

  // Independent thinning: each point kept with probability `keep`.
  CubeSubset thin(double keep, Rng& rng) const;
  CubeSubset permute(const CoordPermutation& sigma) const;

  // Visits members in increasing word order.
  template <typename F>
  void for_each_member(F&& f) const {
    for (std::size_t blk = 0; blk < bits_.size(); ++blk) {
      std::uint64_t b = bits_[blk];
      while (b) {
        const int bit = __builtin_ctzll(b);
        f(static_cast<std::uint32_t>((blk << 6) | static_cast<unsigned>(bit)));
        b &= b - 1;
      }
    }
  }

  // Text form `n=<n>;bits=<hex bitmap, little-endian>` used for fixtures.
  std::string serialize() const;
  static CubeSubset deserialize(const std::string& line);

  bool operator==(const CubeSubset& o) const { return n_ == o.n_ && bits_ == o.bits_; }

 private:
  int n_ = 0;
  std::uint64_t count_ = 0;
  std::vector<std::uint64_t> bits_;
};

// mu(U) = |U| 2^-n, exact as a dyadic rational before conversion.
double measure(const CubeSubset& u);

// H(U) = h(mu(U)).
double subset_entropy(const CubeSubset& u);

}  // namespace esmlab
