#include "padic/clopen_set.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "padic/error.hpp"

namespace padic {

struct Node {
  enum class Kind : std::uint8_t { Empty, Full, Mixed };
  Kind kind = Kind::Empty;
  int height = 0;  // levels below this node that carry structure
  std::vector<NodePtr> dense;
  std::vector<std::pair<std::uint32_t, NodePtr>> sparse;
};

namespace {

using Kind = Node::Kind;

const NodePtr& empty_node() {
  static const NodePtr e = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Empty;
    return NodePtr(n);
  }();
  return e;
}

const NodePtr& full_node() {
  static const NodePtr f = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Full;
    return NodePtr(n);
  }();
  return f;
}

bool empty_at(const NodePtr& n) { return n->kind == Kind::Empty; }
bool full_at(const NodePtr& n) { return n->kind == Kind::Full; }

NodePtr child(const Node& n, std::uint32_t idx) {
  if (n.kind == Kind::Full) return full_node();
  if (n.kind == Kind::Empty) return empty_node();
  if (!n.dense.empty()) return n.dense[idx];
  auto it = std::lower_bound(n.sparse.begin(), n.sparse.end(), idx,
                             [](const auto& e, std::uint32_t v) { return e.first < v; });
  if (it != n.sparse.end() && it->first == idx) return it->second;
  return empty_node();
}

template <class F>
void for_each_nonempty(const Node& n, F&& f) {
  if (!n.dense.empty()) {
    for (std::uint32_t i = 0; i < n.dense.size(); ++i)
      if (!empty_at(n.dense[i])) f(i, n.dense[i]);
  } else {
    for (const auto& [i, c] : n.sparse) f(i, c);
  }
}

/// Canonical node from (index, child) pairs sorted by index; empties may be present.
NodePtr make_node(std::vector<std::pair<std::uint32_t, NodePtr>> kids, std::uint32_t fanout) {
  std::size_t nonempty = 0, full = 0;
  int h = 0;
  for (const auto& [i, c] : kids) {
    if (empty_at(c)) continue;
    ++nonempty;
    if (full_at(c)) ++full;
    h = std::max(h, c->height);
  }
  if (nonempty == 0) return empty_node();
  if (full == fanout) return full_node();
  auto node = std::make_shared<Node>();
  node->kind = Kind::Mixed;
  node->height = h + 1;
  if (nonempty * 4 <= fanout) {
    node->sparse.reserve(nonempty);
    for (auto& [i, c] : kids)
      if (!empty_at(c)) node->sparse.emplace_back(i, std::move(c));
  } else {
    node->dense.assign(fanout, empty_node());
    for (auto& [i, c] : kids) node->dense[i] = std::move(c);
  }
  return node;
}

NodePtr make_dense(std::vector<NodePtr> kids) {
  std::vector<std::pair<std::uint32_t, NodePtr>> pairs;
  pairs.reserve(kids.size());
  auto fanout = static_cast<std::uint32_t>(kids.size());
  for (std::uint32_t i = 0; i < fanout; ++i)
    if (!empty_at(kids[i])) pairs.emplace_back(i, std::move(kids[i]));
  return make_node(std::move(pairs), fanout);
}

NodePtr unite(const NodePtr& a, const NodePtr& b, std::uint32_t fanout) {
  if (full_at(a) || full_at(b)) return full_node();
  if (empty_at(a)) return b;
  if (empty_at(b) || a == b) return a;
  if (!a->sparse.empty() && !b->sparse.empty()) {
    std::vector<std::pair<std::uint32_t, NodePtr>> out;
    auto ia = a->sparse.begin(), ib = b->sparse.begin();
    while (ia != a->sparse.end() || ib != b->sparse.end()) {
      if (ib == b->sparse.end() || (ia != a->sparse.end() && ia->first < ib->first)) {
        out.push_back(*ia++);
      } else if (ia == a->sparse.end() || ib->first < ia->first) {
        out.push_back(*ib++);
      } else {
        out.emplace_back(ia->first, unite(ia->second, ib->second, fanout));
        ++ia;
        ++ib;
      }
    }
    return make_node(std::move(out), fanout);
  }
  std::vector<NodePtr> kids(fanout);
  for (std::uint32_t i = 0; i < fanout; ++i) kids[i] = unite(child(*a, i), child(*b, i), fanout);
  return make_dense(std::move(kids));
}

NodePtr intersect(const NodePtr& a, const NodePtr& b, std::uint32_t fanout) {
  if (empty_at(a) || empty_at(b)) return empty_node();
  if (full_at(a)) return b;
  if (full_at(b) || a == b) return a;
  const NodePtr& small = a->sparse.empty() ? b : a;
  const NodePtr& other = a->sparse.empty() ? a : b;
  std::vector<std::pair<std::uint32_t, NodePtr>> out;
  for_each_nonempty(*small, [&](std::uint32_t i, const NodePtr& c) {
    out.emplace_back(i, intersect(c, child(*other, i), fanout));
  });
  return make_node(std::move(out), fanout);
}

NodePtr invert(const NodePtr& a, std::uint32_t fanout) {
  if (empty_at(a)) return full_node();
  if (full_at(a)) return empty_node();
  std::vector<NodePtr> kids(fanout);
  for (std::uint32_t i = 0; i < fanout; ++i) kids[i] = invert(child(*a, i), fanout);
  return make_dense(std::move(kids));
}

NodePtr subtract(const NodePtr& a, const NodePtr& b, std::uint32_t fanout) {
  if (empty_at(a) || full_at(b)) return empty_node();
  if (empty_at(b)) return a;
  if (a == b) return empty_node();
  if (full_at(a)) return invert(b, fanout);
  std::vector<std::pair<std::uint32_t, NodePtr>> out;
  for_each_nonempty(*a, [&](std::uint32_t i, const NodePtr& c) {
    out.emplace_back(i, subtract(c, child(*b, i), fanout));
  });
  return make_node(std::move(out), fanout);
}

bool equal_nodes(const NodePtr& a, const NodePtr& b, std::uint32_t fanout) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  if (a->kind != Kind::Mixed) return true;
  for (std::uint32_t i = 0; i < fanout; ++i)
    if (!equal_nodes(child(*a, i), child(*b, i), fanout)) return false;
  return true;
}

std::uint32_t fanout_for(long p, int n) {
  std::uint64_t f = 1;
  for (int i = 0; i < n; ++i) {
    f *= static_cast<std::uint64_t>(p);
    if (f > (1u << 24)) throw Error(Errc::InvalidArgument, "p^n too large for a trie node");
  }
  return static_cast<std::uint32_t>(f);
}

void check_compatible(const ClopenSet& a, const ClopenSet& b) {
  if (a.prime() != b.prime() || a.dim() != b.dim())
    throw Error(Errc::MismatchedPrime, "set algebra needs matching p and n");
}

// Exact relative measure of a node's coset: count / p^(n*height).
struct MeasureMemo {
  std::uint32_t fanout;
  std::unordered_map<const Node*, Integer> memo;

  Integer count(const NodePtr& node) {
    if (empty_at(node)) return 0;
    if (full_at(node)) return 1;
    // nodes owned by one parent are reached once, no need to remember them
    const bool shared = node.use_count() > 1;
    if (shared) {
      auto it = memo.find(node.get());
      if (it != memo.end()) return it->second;
    }
    Integer total = 0;
    int h = node->height;
    for_each_nonempty(*node, [&](std::uint32_t, const NodePtr& c) {
      Integer v = count(c);
      int gap = h - 1 - c->height;
      total += v * ipow(Integer(fanout), static_cast<unsigned long>(gap));
    });
    if (shared) memo.emplace(node.get(), total);
    return total;
  }
};

// Same count in machine words, usable while fanout^height < 2^63.
struct SmallMeasureMemo {
  std::uint32_t fanout;
  std::vector<std::uint64_t> scale;
  std::unordered_map<const Node*, std::uint64_t> memo;

  std::uint64_t count(const NodePtr& node) {
    if (empty_at(node)) return 0;
    if (full_at(node)) return 1;
    const bool shared = node.use_count() > 1;
    if (shared) {
      auto it = memo.find(node.get());
      if (it != memo.end()) return it->second;
    }
    std::uint64_t total = 0;
    int h = node->height;
    for_each_nonempty(*node, [&](std::uint32_t, const NodePtr& c) { total += count(c) * scale[h - 1 - c->height]; });
    if (shared) memo.emplace(node.get(), total);
    return total;
  }
};

struct BoxMemo {
  std::uint32_t fanout;
  std::map<std::pair<const Node*, int>, Integer> memo;

  Integer count(const NodePtr& node, int remaining) {
    if (empty_at(node)) return 0;
    if (full_at(node)) return ipow(Integer(fanout), static_cast<unsigned long>(remaining));
    if (remaining == 0) return 1;
    auto key = std::make_pair(node.get(), remaining);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Integer total = 0;
    for_each_nonempty(*node, [&](std::uint32_t, const NodePtr& c) { total += count(c, remaining - 1); });
    memo.emplace(key, total);
    return total;
  }
};

NodePtr product_nodes(const std::vector<NodePtr>& parts, const std::vector<int>& dims, long p,
                      std::uint32_t fanout) {
  bool all_full = true;
  for (const auto& part : parts) {
    if (empty_at(part)) return empty_node();
    if (!full_at(part)) all_full = false;
  }
  if (all_full) return full_node();

  // Nonempty child lists per factor, then every combination.
  std::vector<std::vector<std::pair<std::uint32_t, NodePtr>>> lists(parts.size());
  for (std::size_t f = 0; f < parts.size(); ++f) {
    std::uint32_t sub = 1;
    for (int i = 0; i < dims[f]; ++i) sub *= static_cast<std::uint32_t>(p);
    if (full_at(parts[f])) {
      for (std::uint32_t i = 0; i < sub; ++i) lists[f].emplace_back(i, full_node());
    } else {
      for_each_nonempty(*parts[f], [&](std::uint32_t i, const NodePtr& c) { lists[f].emplace_back(i, c); });
    }
  }
  std::vector<std::uint32_t> weight(parts.size());
  std::uint32_t w = 1;
  for (std::size_t f = 0; f < parts.size(); ++f) {
    weight[f] = w;
    for (int i = 0; i < dims[f]; ++i) w *= static_cast<std::uint32_t>(p);
  }

  std::vector<std::pair<std::uint32_t, NodePtr>> kids;
  std::vector<std::size_t> pos(parts.size(), 0);
  std::vector<NodePtr> sub(parts.size());
  while (true) {
    std::uint32_t idx = 0;
    for (std::size_t f = 0; f < parts.size(); ++f) {
      idx += lists[f][pos[f]].first * weight[f];
      sub[f] = lists[f][pos[f]].second;
    }
    kids.emplace_back(idx, product_nodes(sub, dims, p, fanout));
    std::size_t f = 0;
    while (f < parts.size() && ++pos[f] == lists[f].size()) pos[f++] = 0;
    if (f == parts.size()) break;
  }
  std::sort(kids.begin(), kids.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return make_node(std::move(kids), fanout);
}

std::size_t count_nodes(const NodePtr& node) {
  std::size_t total = 1;
  if (node->kind == Kind::Mixed)
    for_each_nonempty(*node, [&](std::uint32_t, const NodePtr& c) { total += count_nodes(c); });
  return total;
}

}  // namespace

ClopenSet::ClopenSet(long p, int n, int depth) : ClopenSet(p, n, depth, empty_node()) {}

ClopenSet::ClopenSet(long p, int n, int depth, NodePtr root)
    : p_(p), n_(n), depth_(depth), fanout_(0), root_(std::move(root)) {
  if (!is_prime(p)) throw Error(Errc::InvalidArgument, "not a prime: " + std::to_string(p));
  if (n < 1) throw Error(Errc::InvalidArgument, "dimension must be at least 1");
  if (depth < 0) throw Error(Errc::InvalidArgument, "depth must be nonnegative");
  fanout_ = fanout_for(p, n);
  if (root_->height > depth_) throw Error(Errc::InsufficientDepth, "trie deeper than depth");
}

ClopenSet ClopenSet::full(long p, int n, int depth) { return ClopenSet(p, n, depth, full_node()); }

ClopenSet ClopenSet::rectangle(long p, int n, int depth, const BallSpec& ball) {
  ClopenBuilder b(p, n, depth);
  b.add(ball);
  return b.build();
}

ClopenSet ClopenSet::product(std::span<const ClopenSet> factors) {
  if (factors.empty()) throw Error(Errc::InvalidArgument, "empty product");
  long p = factors[0].prime();
  int n = 0, depth = 0;
  std::vector<NodePtr> roots;
  std::vector<int> dims;
  for (const auto& f : factors) {
    if (f.prime() != p) throw Error(Errc::MismatchedPrime, "product factors need one prime");
    n += f.dim();
    depth = std::max(depth, f.depth());
    roots.push_back(f.root_);
    dims.push_back(f.dim());
  }
  std::uint32_t fanout = fanout_for(p, n);
  return ClopenSet(p, n, depth, product_nodes(roots, dims, p, fanout));
}

bool ClopenSet::is_empty() const { return root_->kind == Kind::Empty; }
bool ClopenSet::is_full() const { return root_->kind == Kind::Full; }

ClopenSet ClopenSet::insert_rectangle(const BallSpec& ball) const {
  return set_union(*this, rectangle(p_, n_, depth_, ball));
}

Rational ClopenSet::measure() const {
  if (is_empty()) return Rational(0);
  if (is_full()) return Rational(1);
  const int h = root_->height;
  if (static_cast<double>(h) * std::log2(static_cast<double>(fanout_)) < 62.0) {
    SmallMeasureMemo small{fanout_, {}, {}};
    small.scale.assign(static_cast<std::size_t>(h) + 1, 1);
    for (int j = 1; j <= h; ++j) small.scale[j] = small.scale[j - 1] * fanout_;
    Integer c = small.count(root_);
    return make_rational(c, ipow(Integer(fanout_), static_cast<unsigned long>(h)));
  }
  MeasureMemo memo{fanout_, {}};
  Integer c = memo.count(root_);
  return make_rational(c, ipow(Integer(fanout_), static_cast<unsigned long>(root_->height)));
}

Integer ClopenSet::box_count(int k) const {
  if (k < 0 || k > depth_)
    throw Error(Errc::InsufficientDepth, "box level " + std::to_string(k) + " outside 0.." +
                                             std::to_string(depth_));
  BoxMemo memo{fanout_, {}};
  return memo.count(root_, k);
}

std::vector<std::vector<Integer>> ClopenSet::enumerate_cosets(int k) const {
  if (k < 0 || k > depth_) throw Error(Errc::InsufficientDepth, "enumeration level outside depth");
  std::vector<std::vector<Integer>> out;
  std::vector<Integer> cur(static_cast<std::size_t>(n_), Integer(0));
  std::vector<Integer> scale(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) scale[j] = ipow(p_, static_cast<unsigned long>(j));

  auto walk = [&](auto&& self, const NodePtr& node, int level) -> void {
    if (empty_at(node)) return;
    if (level == k) {
      out.push_back(cur);
      return;
    }
    auto visit = [&](std::uint32_t idx, const NodePtr& c) {
      std::uint32_t rest = idx;
      for (int i = 0; i < n_; ++i) {
        cur[i] += scale[level] * static_cast<unsigned long>(rest % static_cast<std::uint32_t>(p_));
        rest /= static_cast<std::uint32_t>(p_);
      }
      self(self, c, level + 1);
      rest = idx;
      for (int i = 0; i < n_; ++i) {
        cur[i] -= scale[level] * static_cast<unsigned long>(rest % static_cast<std::uint32_t>(p_));
        rest /= static_cast<std::uint32_t>(p_);
      }
    };
    if (full_at(node)) {
      for (std::uint32_t i = 0; i < fanout_; ++i) visit(i, full_node());
    } else {
      for_each_nonempty(*node, visit);
    }
  };
  walk(walk, root_, 0);
  std::sort(out.begin(), out.end());
  return out;
}

bool ClopenSet::contains(std::span<const PAdicInt> point) const {
  if (point.size() != static_cast<std::size_t>(n_))
    throw Error(Errc::InvalidArgument, "point dimension mismatch");
  std::vector<std::vector<int>> digits;
  for (const auto& x : point) {
    if (x.prime() != p_) throw Error(Errc::MismatchedPrime, "point prime differs from set prime");
    digits.push_back(x.digits());
  }
  NodePtr node = root_;
  int level = 0;
  while (node->kind == Kind::Mixed) {
    std::uint32_t idx = 0, w = 1;
    for (int i = 0; i < n_; ++i) {
      if (level >= static_cast<int>(digits[i].size()))
        throw Error(Errc::InsufficientPrecision, "point precision below set depth");
      idx += static_cast<std::uint32_t>(digits[i][level]) * w;
      w *= static_cast<std::uint32_t>(p_);
    }
    node = child(*node, idx);
    ++level;
  }
  return node->kind == Kind::Full;
}

std::size_t ClopenSet::node_count() const { return count_nodes(root_); }

std::string ClopenSet::serialize() const {
  std::ostringstream os;
  os << "clopen v1 p=" << p_ << " n=" << n_ << " depth=" << depth_ << "\n";
  std::string tags;
  auto walk = [&](auto&& self, const NodePtr& node) -> void {
    if (empty_at(node)) {
      tags.push_back('E');
    } else if (full_at(node)) {
      tags.push_back('F');
    } else {
      tags.push_back('M');
      for (std::uint32_t i = 0; i < fanout_; ++i) self(self, child(*node, i));
    }
  };
  walk(walk, root_);
  os << tags << "\n";
  return os.str();
}

ClopenSet ClopenSet::deserialize(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string magic, version, ps, ns, ds, tags;
  is >> magic >> version >> ps >> ns >> ds >> tags;
  auto field = [&](const std::string& s, const std::string& key) -> long {
    if (s.rfind(key + "=", 0) != 0) throw Error(Errc::Parse, "bad clopen header field '" + s + "'");
    try {
      return std::stol(s.substr(key.size() + 1));
    } catch (const std::exception&) {
      throw Error(Errc::Parse, "bad clopen header field '" + s + "'");
    }
  };
  if (magic != "clopen" || version != "v1") throw Error(Errc::Parse, "not a clopen v1 document");
  long p = field(ps, "p");
  int n = static_cast<int>(field(ns, "n"));
  int depth = static_cast<int>(field(ds, "depth"));
  std::uint32_t fanout = fanout_for(p, n);

  std::size_t pos = 0;
  auto read = [&](auto&& self, int level) -> NodePtr {
    if (pos >= tags.size()) throw Error(Errc::Parse, "truncated clopen tag stream");
    char c = tags[pos++];
    if (c == 'E') return empty_node();
    if (c == 'F') return full_node();
    if (c != 'M') throw Error(Errc::Parse, std::string("unknown clopen tag '") + c + "'");
    if (level >= depth) throw Error(Errc::Parse, "mixed node below the declared depth");
    std::vector<NodePtr> kids(fanout);
    std::uint32_t full = 0, empty = 0;
    for (std::uint32_t i = 0; i < fanout; ++i) {
      kids[i] = self(self, level + 1);
      if (full_at(kids[i])) ++full;
      if (empty_at(kids[i])) ++empty;
    }
    if (full == fanout || empty == fanout) throw Error(Errc::Parse, "non-canonical clopen trie");
    return make_dense(std::move(kids));
  };
  NodePtr root = read(read, 0);
  if (pos != tags.size()) throw Error(Errc::Parse, "trailing data after clopen trie");
  return ClopenSet(p, n, depth, root);
}

ClopenSet set_union(const ClopenSet& a, const ClopenSet& b) {
  check_compatible(a, b);
  return ClopenSet(a.p_, a.n_, std::max(a.depth_, b.depth_), unite(a.root_, b.root_, a.fanout_));
}

ClopenSet set_intersection(const ClopenSet& a, const ClopenSet& b) {
  check_compatible(a, b);
  return ClopenSet(a.p_, a.n_, std::max(a.depth_, b.depth_), intersect(a.root_, b.root_, a.fanout_));
}

ClopenSet set_difference(const ClopenSet& a, const ClopenSet& b) {
  check_compatible(a, b);
  return ClopenSet(a.p_, a.n_, std::max(a.depth_, b.depth_), subtract(a.root_, b.root_, a.fanout_));
}

ClopenSet complement(const ClopenSet& a) {
  return ClopenSet(a.p_, a.n_, a.depth_, invert(a.root_, a.fanout_));
}

bool operator==(const ClopenSet& a, const ClopenSet& b) {
  return a.p_ == b.p_ && a.n_ == b.n_ && equal_nodes(a.root_, b.root_, a.fanout_);
}

// ---------------------------------------------------------------------------

ClopenBuilder::ClopenBuilder(long p, int n, int depth) : p_(p), n_(n), depth_(depth) {
  if (!is_prime(p)) throw Error(Errc::InvalidArgument, "not a prime: " + std::to_string(p));
  fanout_ = fanout_for(p, n);
  pool_.emplace_back();
}

std::int32_t ClopenBuilder::child_of(std::int32_t node, std::uint32_t idx) {
  if (pool_[node].kids.empty()) pool_[node].kids.assign(fanout_, -1);
  std::int32_t c = pool_[node].kids[idx];
  if (c < 0) {
    c = static_cast<std::int32_t>(pool_.size());
    pool_.emplace_back();
    pool_[node].kids[idx] = c;
  }
  return c;
}

void ClopenBuilder::insert(std::int32_t node, int level, int top, std::span<std::uint64_t> res,
                           std::span<const int> exps) {
  auto p = static_cast<std::uint64_t>(p_);
  std::vector<std::int32_t> path;
  while (true) {
    if (pool_[node].full) return;
    if (level == top) {
      pool_[node].full = true;
      pool_[node].kids.clear();
      pool_[node].kids.shrink_to_fit();
      break;
    }
    std::uint32_t base = 0, w = 1;
    std::vector<std::uint32_t> free_weights;
    for (int i = 0; i < n_; ++i) {
      if (level < exps[i]) {
        base += static_cast<std::uint32_t>(res[i] % p) * w;
        res[i] /= p;
      } else {
        free_weights.push_back(w);
      }
      w *= static_cast<std::uint32_t>(p_);
    }
    if (free_weights.empty()) {
      path.push_back(node);
      node = child_of(node, base);
      ++level;
      continue;
    }
    std::vector<std::uint32_t> digit(free_weights.size(), 0);
    while (true) {
      std::uint32_t idx = base;
      for (std::size_t f = 0; f < free_weights.size(); ++f) idx += digit[f] * free_weights[f];
      std::vector<std::uint64_t> copy(res.begin(), res.end());
      insert(child_of(node, idx), level + 1, top, copy, exps);
      std::size_t f = 0;
      while (f < digit.size() && ++digit[f] == static_cast<std::uint32_t>(p_)) digit[f++] = 0;
      if (f == digit.size()) break;
    }
    if (!collapse(node)) return;
    break;
  }
  while (!path.empty()) {
    if (!collapse(path.back())) return;
    path.pop_back();
  }
}

bool ClopenBuilder::collapse(std::int32_t node) {
  auto& kids = pool_[node].kids;
  if (kids.empty()) return pool_[node].full;
  for (auto c : kids)
    if (c < 0 || !pool_[c].full) return false;
  pool_[node].full = true;
  pool_[node].kids.clear();
  pool_[node].kids.shrink_to_fit();
  return true;
}

void ClopenBuilder::add_cell(std::span<const std::uint64_t> residues, std::span<const int> exponents) {
  if (residues.size() != static_cast<std::size_t>(n_) || exponents.size() != residues.size())
    throw Error(Errc::InvalidArgument, "cell dimension mismatch");
  int top = 0;
  for (int t : exponents) {
    if (t < 0) throw Error(Errc::InvalidArgument, "negative radius exponent");
    if (t > depth_)
      throw Error(Errc::InsufficientDepth, "insufficient depth: exponent " + std::to_string(t) +
                                               " exceeds depth " + std::to_string(depth_));
    top = std::max(top, t);
  }
  std::vector<std::uint64_t> res(residues.begin(), residues.end());
  insert(0, 0, top, res, exponents);
}

void ClopenBuilder::add(const BallSpec& ball) {
  if (ball.center.size() != static_cast<std::size_t>(n_) || ball.exponents.size() != ball.center.size())
    throw Error(Errc::InvalidArgument, "ball dimension mismatch");
  std::vector<std::uint64_t> res(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    int t = ball.exponents[i];
    if (t > depth_)
      throw Error(Errc::InsufficientDepth, "insufficient depth: exponent " + std::to_string(t) +
                                               " exceeds depth " + std::to_string(depth_));
    if (t <= 0) {
      res[i] = 0;
      continue;
    }
    PAdicInt c = embed_rational(ball.center[i], p_, t);
    if (!c.residue().fits_ulong_p()) throw Error(Errc::InvalidArgument, "ball radius too fine for fast path");
    res[i] = c.residue().get_ui();
  }
  add_cell(res, ball.exponents);
}

void ClopenBuilder::graft(std::int32_t node, const Node& src) {
  if (pool_[node].full || src.kind == Kind::Empty) return;
  if (src.kind == Kind::Full) {
    pool_[node].full = true;
    pool_[node].kids.clear();
    return;
  }
  for_each_nonempty(src, [&](std::uint32_t i, const NodePtr& c) { graft(child_of(node, i), *c); });
  collapse(node);
}

void ClopenBuilder::add_set(const ClopenSet& s) {
  if (s.prime() != p_ || s.dim() != n_) throw Error(Errc::MismatchedPrime, "set does not match builder");
  if (s.depth() > depth_) throw Error(Errc::InsufficientDepth, "set deeper than builder depth");
  graft(0, *s.root_);
}

ClopenSet ClopenBuilder::build() const {
  auto freeze = [&](auto&& self, std::int32_t node) -> NodePtr {
    const MNode& m = pool_[node];
    if (m.full) return full_node();
    if (m.kids.empty()) return empty_node();
    std::vector<std::pair<std::uint32_t, NodePtr>> kids;
    for (std::uint32_t i = 0; i < m.kids.size(); ++i) {
      if (m.kids[i] < 0) continue;
      NodePtr c = self(self, m.kids[i]);
      if (!empty_at(c)) kids.emplace_back(i, std::move(c));
    }
    return make_node(std::move(kids), fanout_);
  };
  return ClopenSet(p_, n_, depth_, freeze(freeze, 0));
}

}  // namespace padic
