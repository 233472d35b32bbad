#pragma once

// Clopen subsets of Z_p^n stored as digit-prefix tries. A node at level j
// stands for a coset c + (p^j Z_p)^n and is empty, full, or mixed with p^n
// children. Child index at a level is sum_i digit_i * p^i.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "padic/padic_int.hpp"
#include "padic/rational.hpp"

namespace padic {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Product of closed balls {|x_i - c_i|_p <= p^-t_i}.
struct BallSpec {
  std::vector<Rational> center;
  std::vector<int> exponents;
};

class ClopenSet {
 public:
  ClopenSet(long p, int n, int depth);  // empty set
  static ClopenSet full(long p, int n, int depth);
  static ClopenSet rectangle(long p, int n, int depth, const BallSpec& ball);
  /// Cartesian product; factor dimensions add up, depth is the max.
  static ClopenSet product(std::span<const ClopenSet> factors);

  long prime() const noexcept { return p_; }
  int dim() const noexcept { return n_; }
  int depth() const noexcept { return depth_; }
  bool is_empty() const;
  bool is_full() const;

  ClopenSet insert_rectangle(const BallSpec& ball) const;

  Rational measure() const;
  /// Number of level-k cosets meeting the set.
  Integer box_count(int k) const;
  /// Representatives (mod p^k per coordinate) of the level-k cosets meeting
  /// the set, in lexicographic order.
  std::vector<std::vector<Integer>> enumerate_cosets(int k) const;
  bool contains(std::span<const PAdicInt> point) const;

  /// Nodes in the trie, counting shared subtrees once per occurrence.
  std::size_t node_count() const;

  /// Text form: header line, then a preorder walk of F/E/M tags.
  std::string serialize() const;
  static ClopenSet deserialize(std::string_view text);

  friend ClopenSet set_union(const ClopenSet& a, const ClopenSet& b);
  friend ClopenSet set_intersection(const ClopenSet& a, const ClopenSet& b);
  friend ClopenSet set_difference(const ClopenSet& a, const ClopenSet& b);
  friend ClopenSet complement(const ClopenSet& a);
  friend bool operator==(const ClopenSet& a, const ClopenSet& b);

 private:
  friend class ClopenBuilder;
  ClopenSet(long p, int n, int depth, NodePtr root);

  long p_;
  int n_;
  int depth_;
  std::uint32_t fanout_;
  NodePtr root_;
};

/// Single-writer bulk construction of a union of rectangles.
class ClopenBuilder {
 public:
  ClopenBuilder(long p, int n, int depth);

  void add(const BallSpec& ball);
  /// Fast path: residues[i] is the center of coordinate i mod p^exponents[i].
  void add_cell(std::span<const std::uint64_t> residues, std::span<const int> exponents);
  void add_set(const ClopenSet& s);

  ClopenSet build() const;

 private:
  struct MNode {
    bool full = false;
    std::vector<std::int32_t> kids;
  };
  void insert(std::int32_t node, int level, int top, std::span<std::uint64_t> res,
              std::span<const int> exps);
  std::int32_t child_of(std::int32_t node, std::uint32_t idx);
  bool collapse(std::int32_t node);
  void graft(std::int32_t node, const Node& src);

  long p_;
  int n_;
  int depth_;
  std::uint32_t fanout_;
  std::vector<MNode> pool_;
};

}  // namespace padic
