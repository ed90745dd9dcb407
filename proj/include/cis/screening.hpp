#ifndef CIS_SCREENING_HPP
#define CIS_SCREENING_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "cis/covgraph.hpp"
#include "cis/dataset.hpp"
#include "cis/error.hpp"
#include "cis/io.hpp"

namespace cis {

struct SelectionRule {
  enum class Kind { Threshold, TopN };
  Kind kind = Kind::TopN;
  double nu = 0.0;  // Threshold: keep IS >= nu
  Index limit = 0;  // TopN: 0 means the screened sample size

  static SelectionRule threshold(double nu) { return {Kind::Threshold, nu, 0}; }
  static SelectionRule top_n(Index limit = 0) { return {Kind::TopN, 0.0, limit}; }
};

inline constexpr Index kNoBlockLimit = std::numeric_limits<Index>::max();

// Rows of data per feature of an inverted block under the default cap.
inline constexpr Index kRowsPerBlockFeature = 10;

inline Index default_max_block(Index rows) { return std::max<Index>(1, rows / kRowsPerBlockFeature); }

// Reciprocal condition estimate below which an indefinite block is singular.
inline constexpr double kSingularRcond = 1e-12;

enum class IndefinitePolicy { ShrinkDepth, PivotedLU };

struct ScreeningConfig {
  double tau = 0.0;
  double alpha = 0.2;
  int depth = kUnlimitedDepth;
  SelectionRule selection = SelectionRule::top_n();
  double ridge_eps = 1e-6;
  // Largest union of depth-limited subgraphs that is inverted. Unset means
  // default_max_block() of the rows behind the correlations; kNoBlockLimit
  // disables the cap.
  std::optional<Index> max_block;
  IndefinitePolicy indefinite = IndefinitePolicy::ShrinkDepth;
  Centering centering = Centering::PooledWithinClass;
};

// One diagonal block of the estimated precision matrix.
struct PrecisionBlock {
  FeatureSet members;  // sorted
  Index component_id = 0;
  Eigen::MatrixXd precision;
  double ridge = 0.0;        // diagonal loading that made the block invertible, 0 if none
  bool indefinite = false;  // inverted by pivoted LU after every Cholesky attempt failed
  int depth = 0;            // deepest BFS level among the members
};

struct ScreeningResult {
  ClassPair pair;
  Eigen::VectorXd mean_difference;
  FeatureSet marginal_set;
  std::vector<PrecisionBlock> blocks;
  int depth_reached = 0;
  bool truncated = false;  // expansion stopped by the block-size cap
  int depth_shrinks = 0;   // BFS levels dropped from non positive definite blocks
  Eigen::VectorXd importance;
  FeatureSet selected;  // in rank order
  std::vector<std::string> warnings;

  FeatureSet covered() const {
    FeatureSet out;
    for (const auto& b : blocks) out.insert(out.end(), b.members.begin(), b.members.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t ridge_fallbacks() const {
    return static_cast<std::size_t>(std::count_if(blocks.begin(), blocks.end(),
                                                  [](const PrecisionBlock& b) { return b.ridge > 0.0 || b.indefinite; }));
  }
};

// { j : |mean_a(j) - mean_b(j)| > tau }
inline FeatureSet marginal_screen(const Eigen::VectorXd& mean_difference, double tau) {
  FeatureSet out;
  for (Index j = 0; j < mean_difference.size(); ++j)
    if (std::abs(mean_difference(j)) > tau) out.push_back(j);
  return out;
}

inline FeatureSet marginal_screen(const ClassSummary& summary, const ClassPair& pair, double tau) {
  return marginal_screen(summary.mean_difference(pair), tau);
}

struct AnchorCover {
  FeatureSet members;      // sorted
  std::vector<int> level;  // BFS level of each member, 0 for anchors
  int depth_reached = 0;
  bool truncated = false;
};

// Features within `depth` edges of the anchors, limited to `max_block`.
//
// When the full depth-limited union fits, it is returned exactly. Otherwise
// the union is grown best-first: starting from the anchors, the candidate
// joined by the strongest edge (largest |value|, ties by index) to an
// already chosen feature of level < depth is added, until the cap is reached.
// A feature's level is the number of edges on the path that admitted it.
template <ThresholdGraph G>
AnchorCover expand_anchors(const G& graph, std::span<const Index> anchors, int depth, Index max_block) {
  AnchorCover cover;
  std::unordered_map<Index, int> seen;
  std::vector<Index> frontier;
  for (Index a : anchors)
    if (seen.emplace(a, 0).second) frontier.push_back(a);
  std::sort(frontier.begin(), frontier.end());

  auto finish = [&] {
    std::vector<std::pair<Index, int>> all(seen.begin(), seen.end());
    std::sort(all.begin(), all.end());
    for (const auto& [j, l] : all) {
      cover.members.push_back(j);
      cover.level.push_back(l);
      cover.depth_reached = std::max(cover.depth_reached, l);
    }
    return cover;
  };

  bool overflow = static_cast<Index>(seen.size()) > max_block;
  for (int level = 1; level <= depth && !frontier.empty() && !overflow; ++level) {
    std::vector<Index> next;
    for (Index u : frontier)
      for (const auto& nb : graph.neighbors(u))
        if (seen.emplace(nb.index, level).second) next.push_back(nb.index);
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
    overflow = static_cast<Index>(seen.size()) > max_block;
  }
  if (!overflow) return finish();

  cover.truncated = true;
  seen.clear();
  struct Candidate {
    double strength;
    Index index;
    int level;
    bool operator<(const Candidate& o) const {  // max-heap: strongest, then smallest index, then level
      if (strength != o.strength) return strength < o.strength;
      return index != o.index ? index > o.index : level > o.level;
    }
  };
  std::priority_queue<Candidate> heap;
  auto push_neighbors = [&](Index u, int level) {
    if (level >= depth) return;
    for (const auto& nb : graph.neighbors(u))
      if (!seen.count(nb.index)) heap.push({std::abs(nb.value), nb.index, level + 1});
  };
  for (Index a : anchors) seen.emplace(a, 0);
  if (static_cast<Index>(seen.size()) < max_block)
    for (const auto& [a, l] : std::vector<std::pair<Index, int>>(seen.begin(), seen.end())) push_neighbors(a, 0);
  while (!heap.empty() && static_cast<Index>(seen.size()) < max_block) {
    const Candidate c = heap.top();
    heap.pop();
    if (!seen.emplace(c.index, c.level).second) continue;
    push_neighbors(c.index, c.level);
  }
  return finish();
}

namespace detail {

inline std::optional<PrecisionBlock> cholesky_inverse(const Eigen::MatrixXd& local, double ridge_eps) {
  const Index k = local.rows();
  double ridge = 0.0;
  for (int attempt = 0; attempt <= 4; ++attempt) {
    if (attempt > 0) ridge = ridge_eps * std::ldexp(1.0, attempt - 1);
    Eigen::MatrixXd m = local;
    m.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) {
      PrecisionBlock block;
      const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(k, k));
      block.precision = 0.5 * (inv + inv.transpose());
      block.ridge = ridge;
      return block;
    }
  }
  return std::nullopt;
}

inline std::optional<PrecisionBlock> lu_inverse(const Eigen::MatrixXd& local) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(local);
  if (!(lu.rcond() >= kSingularRcond)) return std::nullopt;
  PrecisionBlock block;
  const Eigen::MatrixXd inv = lu.inverse();
  block.precision = 0.5 * (inv + inv.transpose());
  block.indefinite = true;
  return block;
}

// Connected pieces of the subgraph of `local` induced by `positions`.
inline std::vector<std::vector<Index>> split_pieces(const Eigen::MatrixXd& local, const std::vector<Index>& positions) {
  const std::size_t k = positions.size();
  std::vector<std::size_t> parent(k);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t b = 0; b < k; ++b)
    for (std::size_t a = b + 1; a < k; ++a)
      if (local(positions[a], positions[b]) != 0.0) {
        const auto ra = find(a), rb = find(b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
  std::vector<std::vector<Index>> pieces;
  std::unordered_map<std::size_t, std::size_t> slot;
  for (std::size_t a = 0; a < k; ++a) {
    auto [it, inserted] = slot.emplace(find(a), pieces.size());
    if (inserted) pieces.emplace_back();
    pieces[it->second].push_back(positions[a]);
  }
  return pieces;
}

}  // namespace detail

// Block-diagonal precision estimate over the depth-limited neighborhoods of
// the anchors. Anchors of one component share a single block (their
// neighborhoods are unioned, then inverted jointly); blocks are the connected
// pieces of the induced subgraph, so the result equals inverting the whole
// union at once.
//
// Each block is inverted by Cholesky, retried with ridge_eps * 2^k on the
// diagonal for k = 0..3. A block that is still not positive definite is then
// handled per `policy`: ShrinkDepth drops its deepest BFS level and retries
// the remaining pieces, falling back to pivoted LU once only anchors remain;
// PivotedLU inverts it directly. SingularBlock only for a numerically
// singular block.
template <ThresholdGraph G>
ScreeningResult block_precision(const G& graph, std::span<const Index> anchors, int depth, double ridge_eps,
                                Index max_block = kNoBlockLimit,
                                IndefinitePolicy policy = IndefinitePolicy::ShrinkDepth) {
  ScreeningResult result;
  if (anchors.empty()) return result;
  const AnchorCover cover = expand_anchors(graph, anchors, depth, max_block);
  result.depth_reached = cover.depth_reached;
  result.truncated = cover.truncated;

  const auto& u = cover.members;
  const Eigen::MatrixXd local = graph.local_matrix(u);
  std::vector<Index> all(u.size());
  std::iota(all.begin(), all.end(), Index{0});
  std::vector<std::vector<Index>> work = detail::split_pieces(local, all);

  while (!work.empty()) {
    std::vector<Index> piece = std::move(work.back());
    work.pop_back();
    const Index size = static_cast<Index>(piece.size());
    Eigen::MatrixXd sub(size, size);
    for (Index a = 0; a < size; ++a)
      for (Index b = 0; b < size; ++b)
        sub(a, b) = local(piece[static_cast<std::size_t>(a)], piece[static_cast<std::size_t>(b)]);

    int top = 0;
    for (Index a : piece) top = std::max(top, cover.level[static_cast<std::size_t>(a)]);
    std::optional<PrecisionBlock> block = detail::cholesky_inverse(sub, ridge_eps);
    if (!block && policy == IndefinitePolicy::ShrinkDepth && top > 0) {
      std::vector<Index> kept;
      for (Index a : piece)
        if (cover.level[static_cast<std::size_t>(a)] < top) kept.push_back(a);
      for (auto& p : detail::split_pieces(local, kept)) work.push_back(std::move(p));
      result.warnings.push_back("block at feature " + std::to_string(u[static_cast<std::size_t>(piece.front())] + 1) +
                                " is not positive definite; BFS level " + std::to_string(top) + " dropped");
      ++result.depth_shrinks;
      continue;
    }
    const Index first = u[static_cast<std::size_t>(piece.front())];
    const Index label = graph.component_label(first);
    const Index component = label >= 0 ? label : first;
    if (!block) block = detail::lu_inverse(sub);
    if (!block) throw SingularBlock(component);
    for (Index a : piece) block->members.push_back(u[static_cast<std::size_t>(a)]);
    block->component_id = component;
    block->depth = top;
    if (block->indefinite)
      result.warnings.push_back("block of component " + std::to_string(component + 1) +
                                " is indefinite; inverted by pivoted LU");
    else if (block->ridge > 0.0)
      result.warnings.push_back("ridge " + io::format_double(block->ridge) + " added to block of component " +
                                std::to_string(component + 1));
    result.blocks.push_back(std::move(*block));
  }
  std::sort(result.blocks.begin(), result.blocks.end(),
            [](const PrecisionBlock& a, const PrecisionBlock& b) { return a.members.front() < b.members.front(); });
  return result;
}

// IS_j = |sum_{j'} Omega_{jj'} delta_{j'}| over covered features, 0 elsewhere.
inline Eigen::VectorXd importance_scores(const std::vector<PrecisionBlock>& blocks,
                                         const Eigen::VectorXd& mean_difference) {
  Eigen::VectorXd is = Eigen::VectorXd::Zero(mean_difference.size());
  for (const auto& b : blocks) {
    Eigen::VectorXd d(static_cast<Index>(b.members.size()));
    for (std::size_t a = 0; a < b.members.size(); ++a) d(static_cast<Index>(a)) = mean_difference(b.members[a]);
    const Eigen::VectorXd w = b.precision * d;
    for (std::size_t a = 0; a < b.members.size(); ++a) is(b.members[a]) = std::abs(w(static_cast<Index>(a)));
  }
  return is;
}

inline Eigen::VectorXd importance_scores(const ScreeningResult& partial, const ClassSummary& summary,
                                         const ClassPair& pair) {
  return importance_scores(partial.blocks, summary.mean_difference(pair));
}

// Features with a positive score, by score descending then index ascending.
inline FeatureSet ranking(const Eigen::VectorXd& scores) {
  FeatureSet order;
  for (Index j = 0; j < scores.size(); ++j)
    if (scores(j) > 0.0) order.push_back(j);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return scores(a) > scores(b); });
  return order;
}

// `default_limit` replaces a TopN limit of 0.
inline FeatureSet select(const Eigen::VectorXd& scores, const SelectionRule& rule, Index default_limit = 0) {
  FeatureSet order = ranking(scores);
  if (rule.kind == SelectionRule::Kind::TopN) {
    const Index limit = rule.limit > 0 ? rule.limit : default_limit;
    if (limit >= 0 && static_cast<Index>(order.size()) > limit) order.resize(static_cast<std::size_t>(limit));
    return order;
  }
  FeatureSet out;
  for (Index j : order)
    if (scores(j) >= rule.nu) out.push_back(j);
  return out;
}

// Steps 2, 4 and 5 of the screening for one class pair. `summary` comes from
// the standardized training data; the graph from the same data.
template <ThresholdGraph G>
ScreeningResult screen(const G& graph, const ClassSummary& summary, const ClassPair& pair,
                       const ScreeningConfig& config) {
  const Index n_pair = summary.class_counts[static_cast<std::size_t>(pair.first - 1)] +
                       summary.class_counts[static_cast<std::size_t>(pair.second - 1)];
  const Index n_rows = std::accumulate(summary.class_counts.begin(), summary.class_counts.end(), Index{0});
  const Eigen::VectorXd delta = summary.mean_difference(pair);
  const FeatureSet anchors = marginal_screen(delta, config.tau);

  ScreeningResult result = block_precision(graph, anchors, config.depth, config.ridge_eps,
                                           config.max_block.value_or(default_max_block(n_rows)), config.indefinite);
  result.pair = pair;
  result.mean_difference = delta;
  result.marginal_set = anchors;
  if (anchors.empty()) {
    result.importance = Eigen::VectorXd::Zero(delta.size());
    result.warnings.push_back("no feature passed the marginal threshold; selection is empty");
    return result;
  }
  result.importance = importance_scores(result.blocks, delta);
  result.selected = select(result.importance, config.selection, n_pair);
  return result;
}

// Marginal screening comparator: every feature ranked by |delta| (ties by
// index); the selection applies `rule` to features with |delta| > tau.
struct MarginalBaseline {
  FeatureSet selected;
  FeatureSet ranking;
};

inline MarginalBaseline marginal_baseline(const Eigen::VectorXd& mean_difference, double tau,
                                          const SelectionRule& rule, Index default_limit) {
  MarginalBaseline out;
  const Eigen::VectorXd a = mean_difference.cwiseAbs();
  out.ranking.resize(static_cast<std::size_t>(a.size()));
  std::iota(out.ranking.begin(), out.ranking.end(), Index{0});
  std::stable_sort(out.ranking.begin(), out.ranking.end(), [&](Index x, Index y) { return a(x) > a(y); });
  Eigen::VectorXd gated = Eigen::VectorXd::Zero(a.size());
  for (Index j : marginal_screen(mean_difference, tau)) gated(j) = a(j);
  out.selected = select(gated, rule, default_limit);
  return out;
}

inline std::string screening_report_csv(const ScreeningResult& r) {
  const Index p = r.importance.size();
  std::vector<Index> component(static_cast<std::size_t>(p), -1);
  for (const auto& b : r.blocks)
    for (Index j : b.members) component[static_cast<std::size_t>(j)] = b.component_id;
  std::vector<Index> rank(static_cast<std::size_t>(p), 0);
  const FeatureSet order = ranking(r.importance);
  for (std::size_t i = 0; i < order.size(); ++i) rank[static_cast<std::size_t>(order[i])] = static_cast<Index>(i) + 1;
  std::vector<char> chosen(static_cast<std::size_t>(p), 0);
  for (Index j : r.selected) chosen[static_cast<std::size_t>(j)] = 1;

  io::CsvWriter w({"feature", "marginal_difference", "component_id", "IS", "selected", "rank"});
  for (Index j = 0; j < p; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    w.row({std::to_string(j + 1), io::format_double(r.mean_difference(j)),
           component[sj] >= 0 ? std::to_string(component[sj] + 1) : std::string(),
           io::format_double(r.importance(j)), chosen[sj] ? "1" : "0",
           rank[sj] > 0 ? std::to_string(rank[sj]) : std::string()});
  }
  return w.str();
}

}  // namespace cis

#endif  // CIS_SCREENING_HPP
