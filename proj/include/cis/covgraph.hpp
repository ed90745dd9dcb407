#ifndef CIS_COVGRAPH_HPP
#define CIS_COVGRAPH_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "cis/dataset.hpp"
#include "cis/error.hpp"
#include "cis/io.hpp"
#include "cis/parallel.hpp"

namespace cis {

inline constexpr int kUnlimitedDepth = std::numeric_limits<int>::max();

// Candidate entries from blocked products are re-evaluated exactly when they
// land within this margin of the threshold.
inline constexpr double kThresholdMargin = 1e-9;

enum class Centering {
  PooledWithinClass,  // subtract each class mean before cross-products
  Plain,              // subtract the global mean only
};

// Columns centered and scaled to unit norm so that Z_j' Z_k is the
// correlation of features j and k. Constant (after centering) columns stay
// zero and correlate with nothing.
class CorrelationBasis {
 public:
  explicit CorrelationBasis(const LabeledMatrix& data, Centering centering = Centering::PooledWithinClass)
      : z_(data.values()) {
    if (centering == Centering::PooledWithinClass) {
      const ClassSummary s = class_summaries(data, true);
      for (Index i = 0; i < z_.rows(); ++i) z_.row(i) -= s.class_means.row(data.label(i) - 1);
    } else {
      z_.rowwise() -= z_.colwise().mean();
    }
    for (Index j = 0; j < z_.cols(); ++j) {
      const double norm = z_.col(j).norm();
      if (norm > 0.0) z_.col(j) /= norm;
    }
  }

  Index features() const noexcept { return z_.cols(); }
  Index samples() const noexcept { return z_.rows(); }
  const Eigen::MatrixXd& columns() const noexcept { return z_; }

  // Sequential dot product; the summation order is fixed so values do not
  // depend on how a caller tiles the work.
  double correlation(Index i, Index j) const {
    const double* a = z_.col(i).data();
    const double* b = z_.col(j).data();
    double s = 0.0;
    for (Index r = 0; r < z_.rows(); ++r) s += a[r] * b[r];
    return s;
  }

 private:
  Eigen::MatrixXd z_;
};

struct Neighbor {
  Index index;
  double value;
};

struct Edge {
  Index first;   // first < second
  Index second;
  double value;
};

// Anything the screening step can walk: adjacency lists plus dense principal
// submatrices of the thresholded correlation matrix (unit diagonal).
template <typename G>
concept ThresholdGraph = requires(const G& g, Index j, std::span<const Index> members) {
  { g.features() } -> std::convertible_to<Index>;
  { g.alpha() } -> std::convertible_to<double>;
  { g.neighbors(j) } -> std::convertible_to<std::vector<Neighbor>>;
  { g.local_matrix(members) } -> std::convertible_to<Eigen::MatrixXd>;
  { g.component_label(j) } -> std::convertible_to<Index>;
};

// Sparse symmetric matrix of correlations with |value| >= alpha.
class ThresholdedCorrGraph {
 public:
  ThresholdedCorrGraph() = default;

  ThresholdedCorrGraph(Index p, double alpha, std::vector<Edge> edges)
      : p_(p), alpha_(alpha), edges_(std::move(edges)) {
    for (auto& e : edges_)
      if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
      return a.first != b.first ? a.first < b.first : a.second < b.second;
    });
    offsets_.assign(static_cast<std::size_t>(p_) + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[static_cast<std::size_t>(e.first) + 1];
      ++offsets_[static_cast<std::size_t>(e.second) + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    adjacency_.resize(2 * edges_.size());
    auto cursor = offsets_;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      adjacency_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(edges_[e].first)]++)] = {edges_[e].second, e};
      adjacency_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(edges_[e].second)]++)] = {edges_[e].first, e};
    }
    for (Index j = 0; j < p_; ++j)
      std::sort(adjacency_.begin() + offsets_[static_cast<std::size_t>(j)],
                adjacency_.begin() + offsets_[static_cast<std::size_t>(j) + 1],
                [](const Slot& a, const Slot& b) { return a.neighbor < b.neighbor; });
  }

  Index features() const noexcept { return p_; }
  double alpha() const noexcept { return alpha_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::vector<Neighbor> neighbors(Index j) const {
    std::vector<Neighbor> out;
    for (Index s = offsets_[static_cast<std::size_t>(j)]; s < offsets_[static_cast<std::size_t>(j) + 1]; ++s) {
      const auto& slot = adjacency_[static_cast<std::size_t>(s)];
      out.push_back({slot.neighbor, edges_[slot.edge].value});
    }
    return out;
  }

  // Stored value of (i, j), 1 on the diagonal, 0 when no edge survives.
  double value(Index i, Index j) const {
    if (i == j) return 1.0;
    auto first = adjacency_.begin() + offsets_[static_cast<std::size_t>(i)];
    auto last = adjacency_.begin() + offsets_[static_cast<std::size_t>(i) + 1];
    auto it = std::lower_bound(first, last, j, [](const Slot& s, Index key) { return s.neighbor < key; });
    return (it != last && it->neighbor == j) ? edges_[it->edge].value : 0.0;
  }

  Eigen::MatrixXd local_matrix(std::span<const Index> members) const {
    const Index k = static_cast<Index>(members.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(k, k);
    std::unordered_map<Index, Index> pos;
    for (Index a = 0; a < k; ++a) pos[members[static_cast<std::size_t>(a)]] = a;
    for (Index a = 0; a < k; ++a)
      for (const auto& nb : neighbors(members[static_cast<std::size_t>(a)])) {
        auto it = pos.find(nb.index);
        if (it != pos.end()) m(a, it->second) = nb.value;
      }
    return m;
  }

  bool has_components() const noexcept { return !component_id_.empty(); }
  const std::vector<Index>& component_ids() const noexcept { return component_id_; }
  const std::vector<FeatureSet>& components() const noexcept { return components_; }

  // Canonical component id (smallest member), or -1 before labeling.
  Index component_label(Index j) const {
    return component_id_.empty() ? Index{-1} : component_id_[static_cast<std::size_t>(j)];
  }

  const FeatureSet& component_members(Index id) const {
    auto it = std::lower_bound(components_.begin(), components_.end(), id,
                               [](const FeatureSet& c, Index key) { return c.front() < key; });
    if (it == components_.end() || it->front() != id) throw InvalidData("unknown component id");
    return *it;
  }

  void set_components(std::vector<Index> ids) {
    component_id_ = std::move(ids);
    components_.clear();
    std::vector<Index> slot(static_cast<std::size_t>(p_), -1);
    for (Index j = 0; j < p_; ++j) {
      const Index id = component_id_[static_cast<std::size_t>(j)];
      if (slot[static_cast<std::size_t>(id)] < 0) {
        slot[static_cast<std::size_t>(id)] = static_cast<Index>(components_.size());
        components_.emplace_back();
      }
      components_[static_cast<std::size_t>(slot[static_cast<std::size_t>(id)])].push_back(j);
    }
  }

 private:
  struct Slot {
    Index neighbor;
    std::size_t edge;
  };

  Index p_ = 0;
  double alpha_ = 0.0;
  std::vector<Edge> edges_;
  std::vector<Index> offsets_;
  std::vector<Slot> adjacency_;
  std::vector<Index> component_id_;
  std::vector<FeatureSet> components_;
};

inline void check_standardized(const LabeledMatrix& data, double tol = 1e-6) {
  const auto& x = data.values();
  const double n = static_cast<double>(x.rows());
  for (Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    const double sd = std::sqrt((x.col(j).array() - mean).square().sum() / (n - 1.0));
    if (std::abs(sd - 1.0) > tol) throw NotStandardized(j);
  }
}

// Thresholded correlation graph computed in square column tiles of at most
// memory_budget bytes each, so the dense p x p matrix is never formed.
inline ThresholdedCorrGraph build_graph(const CorrelationBasis& basis, double alpha,
                                        std::size_t memory_budget, unsigned threads = 1) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidData("alpha must lie in (0, 1)");
  const Index p = basis.features();
  const auto width = static_cast<Index>(std::sqrt(static_cast<double>(memory_budget) / sizeof(double)));
  if (width < 1) throw BudgetTooSmall("memory budget of " + std::to_string(memory_budget) + " bytes cannot hold one tile");
  const Index tile = std::min(width, std::max<Index>(p, 1));
  const Index tiles = (p + tile - 1) / tile;

  std::vector<std::pair<Index, Index>> work;
  for (Index a = 0; a < tiles; ++a)
    for (Index b = a; b < tiles; ++b) work.emplace_back(a, b);

  const auto& z = basis.columns();
  std::vector<std::vector<Edge>> found(work.size());
  parallel_for(work.size(), threads, [&](std::size_t w) {
    const Index a0 = work[w].first * tile, b0 = work[w].second * tile;
    const Index na = std::min(tile, p - a0), nb = std::min(tile, p - b0);
    const Eigen::MatrixXd block = z.middleCols(a0, na).transpose() * z.middleCols(b0, nb);
    auto& out = found[w];
    for (Index jb = 0; jb < nb; ++jb)
      for (Index ia = 0; ia < na; ++ia) {
        const Index i = a0 + ia, j = b0 + jb;
        if (j <= i || std::abs(block(ia, jb)) < alpha - kThresholdMargin) continue;
        const double r = basis.correlation(i, j);
        if (std::abs(r) >= alpha) out.push_back({i, j, r});
      }
  });
  std::vector<Edge> edges;
  for (auto& f : found) edges.insert(edges.end(), f.begin(), f.end());
  return ThresholdedCorrGraph(p, alpha, std::move(edges));
}

inline ThresholdedCorrGraph build_graph(const LabeledMatrix& standardized, double alpha,
                                        std::size_t memory_budget,
                                        Centering centering = Centering::PooledWithinClass,
                                        unsigned threads = 1) {
  check_standardized(standardized);
  return build_graph(CorrelationBasis(standardized, centering), alpha, memory_budget, threads);
}

// Union-find with path compression; ids are the smallest member index.
inline ThresholdedCorrGraph connected_components(ThresholdedCorrGraph graph) {
  const Index p = graph.features();
  std::vector<Index> parent(static_cast<std::size_t>(p));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    Index root = x;
    while (parent[static_cast<std::size_t>(root)] != root) root = parent[static_cast<std::size_t>(root)];
    while (parent[static_cast<std::size_t>(x)] != root) {
      const Index next = parent[static_cast<std::size_t>(x)];
      parent[static_cast<std::size_t>(x)] = root;
      x = next;
    }
    return root;
  };
  for (const auto& e : graph.edges()) {
    const Index a = find(e.first), b = find(e.second);
    // Linking the larger root under the smaller keeps each root equal to the
    // smallest member of its set.
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
  std::vector<Index> ids(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) ids[static_cast<std::size_t>(j)] = find(j);
  graph.set_components(std::move(ids));
  return graph;
}

// On-demand view of the same thresholded graph: neighbor lists are computed
// from the correlation basis when first requested and cached. Edge values are
// bit-identical to build_graph() on the same basis. Thread-safe.
class LazyCorrelationGraph {
 public:
  LazyCorrelationGraph(std::shared_ptr<const CorrelationBasis> basis, double alpha)
      : basis_(std::move(basis)), alpha_(alpha) {
    if (!(alpha_ > 0.0 && alpha_ < 1.0)) throw InvalidData("alpha must lie in (0, 1)");
  }

  Index features() const noexcept { return basis_->features(); }
  double alpha() const noexcept { return alpha_; }
  Index component_label(Index) const noexcept { return -1; }
  const CorrelationBasis& basis() const noexcept { return *basis_; }

  std::vector<Neighbor> neighbors(Index j) const {
    {
      std::lock_guard lock(mutex_);
      auto it = cache_.find(j);
      if (it != cache_.end()) return it->second;
    }
    const auto& z = basis_->columns();
    const Eigen::VectorXd r = z.transpose() * z.col(j);
    std::vector<Neighbor> out;
    for (Index k = 0; k < r.size(); ++k) {
      if (k == j || std::abs(r(k)) < alpha_ - kThresholdMargin) continue;
      const double exact = j < k ? basis_->correlation(j, k) : basis_->correlation(k, j);
      if (std::abs(exact) >= alpha_) out.push_back({k, exact});
    }
    std::lock_guard lock(mutex_);
    cache_.emplace(j, out);
    return out;
  }

  Eigen::MatrixXd local_matrix(std::span<const Index> members) const {
    const Index k = static_cast<Index>(members.size());
    const auto& z = basis_->columns();
    Eigen::MatrixXd cols(z.rows(), k);
    for (Index a = 0; a < k; ++a) cols.col(a) = z.col(members[static_cast<std::size_t>(a)]);
    const Eigen::MatrixXd gram = cols.transpose() * cols;
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(k, k);
    for (Index b = 0; b < k; ++b)
      for (Index a = b + 1; a < k; ++a) {
        if (std::abs(gram(a, b)) < alpha_ - kThresholdMargin) continue;
        const Index i = members[static_cast<std::size_t>(a)], j = members[static_cast<std::size_t>(b)];
        const double exact = i < j ? basis_->correlation(i, j) : basis_->correlation(j, i);
        if (std::abs(exact) >= alpha_) m(a, b) = m(b, a) = exact;
      }
    return m;
  }

 private:
  std::shared_ptr<const CorrelationBasis> basis_;
  double alpha_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<Index, std::vector<Neighbor>> cache_;
};

static_assert(ThresholdGraph<ThresholdedCorrGraph>);
static_assert(ThresholdGraph<LazyCorrelationGraph>);

struct DepthSubgraph {
  Index anchor = 0;
  int depth = 0;
  FeatureSet members;            // sorted, contains anchor
  Eigen::MatrixXd local_matrix;  // thresholded correlations on members, unit diagonal
};

// Features reachable from `anchor` through at most `depth` edges.
template <ThresholdGraph G>
FeatureSet reachable_within(const G& graph, Index anchor, int depth) {
  std::vector<Index> frontier{anchor};
  std::unordered_map<Index, int> seen{{anchor, 0}};
  for (int level = 1; level <= depth && !frontier.empty(); ++level) {
    std::vector<Index> next;
    for (Index u : frontier)
      for (const auto& nb : graph.neighbors(u))
        if (seen.emplace(nb.index, level).second) next.push_back(nb.index);
    frontier = std::move(next);
  }
  FeatureSet members;
  members.reserve(seen.size());
  for (const auto& [j, level] : seen) members.push_back(j);
  std::sort(members.begin(), members.end());
  return members;
}

template <ThresholdGraph G>
DepthSubgraph depth_subgraph(const G& graph, Index anchor, int depth) {
  if (anchor < 0 || anchor >= graph.features()) throw InvalidData("anchor outside 1..p");
  if (depth < 1) throw InvalidData("depth must be at least 1");
  DepthSubgraph s;
  s.anchor = anchor;
  s.depth = depth;
  s.members = reachable_within(graph, anchor, depth);
  s.local_matrix = graph.local_matrix(s.members);
  return s;
}

inline std::string edges_csv(const ThresholdedCorrGraph& graph) {
  io::CsvWriter w({"feature_a", "feature_b", "value"});
  for (const auto& e : graph.edges())
    w.row({std::to_string(e.first + 1), std::to_string(e.second + 1), io::format_double(e.value)});
  return w.str();
}

inline std::string components_csv(const ThresholdedCorrGraph& graph) {
  io::CsvWriter w({"feature", "component_id"});
  for (Index j = 0; j < graph.features(); ++j)
    w.row({std::to_string(j + 1), std::to_string(graph.component_label(j) + 1)});
  return w.str();
}

}  // namespace cis

#endif  // CIS_COVGRAPH_HPP
