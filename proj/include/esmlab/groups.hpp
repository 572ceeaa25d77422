#pragma once

// Free and free-abelian group elements in canonical form, symmetric
// generating sets, and breadth-first Cayley balls with adjacency. Vertex
// order is BFS with generator order a1, a1^-1, a2, a2^-1, ..., which fixes
// all downstream sampling reproducibility.

#include <cstdint>
#include <string>
#include <vector>

namespace esmlab::groups {

enum class Kind { kFree, kFreeAbelian };

struct GroupSpec {
  Kind kind = Kind::kFree;
  int rank = 2;  // number of free generators d

  int generator_count() const { return 2 * rank; }
  bool operator==(const GroupSpec& o) const { return kind == o.kind && rank == o.rank; }

  // Parses "free:2" or "zd:2".
  static GroupSpec parse(const std::string& text);
  std::string to_string() const;
};

// Canonical form: reduced word of signed generator codes (+g / -g, g in
// 1..d) for free groups; the integer vector itself for Z^d.
class GroupElement {
 public:
  GroupElement() = default;
  GroupElement(GroupSpec spec, std::vector<int> data);

  static GroupElement identity(const GroupSpec& spec);
  // Generator by symmetric index: 0 -> a1, 1 -> a1^-1, 2 -> a2, ...
  static GroupElement generator(const GroupSpec& spec, int sym_index);
  // Free group element from a word like "a", "ab", "a2" (= a*a), "A" (= a^-1).
  static GroupElement from_word(const GroupSpec& spec, const std::string& word);

  const GroupSpec& spec() const { return spec_; }
  const std::vector<int>& data() const { return data_; }
  bool is_identity() const;
  int word_length() const;  // graph distance to the identity

  GroupElement operator*(const GroupElement& o) const;
  GroupElement inverse() const;

  bool operator==(const GroupElement& o) const { return spec_ == o.spec_ && data_ == o.data_; }
  bool operator<(const GroupElement& o) const;  // total order: length then lexicographic

  std::uint64_t hash() const;
  std::string to_string() const;

 private:
  GroupSpec spec_;
  std::vector<int> data_;
};

// Radius-R ball around the identity, identity first; adjacency per symmetric
// generator index, -1 when the neighbor falls outside the ball.
class CayleyBall {
 public:
  CayleyBall(const GroupSpec& spec, int radius);

  const GroupSpec& spec() const { return spec_; }
  int radius() const { return radius_; }
  std::size_t size() const { return vertices_.size(); }
  const GroupElement& vertex(std::size_t idx) const { return vertices_[idx]; }
  int distance(std::size_t idx) const { return distance_[idx]; }
  // Index of an element, or -1 when outside the ball.
  std::int64_t index_of(const GroupElement& g) const;
  std::int64_t neighbor(std::size_t idx, int sym_index) const {
    return adjacency_[idx * static_cast<std::size_t>(spec_.generator_count()) + static_cast<std::size_t>(sym_index)];
  }
  // Vertices within the given distance form a prefix of the vertex list.
  std::size_t count_within(int dist) const;

 private:
  GroupSpec spec_;
  int radius_ = 0;
  std::vector<GroupElement> vertices_;
  std::vector<int> distance_;
  std::vector<std::int64_t> adjacency_;
  std::vector<std::pair<std::uint64_t, std::int64_t>> index_;  // sorted (hash, idx)
};

// Closed-form ball sizes used as construction oracles.
std::uint64_t free_ball_size(int d, int radius);
std::uint64_t zd_ball_size(int d, int radius);

inline constexpr std::uint64_t kBallBudget = 6'000'000;

}  // namespace esmlab::groups
