#ifndef CIS_SIMGEN_HPP
#define CIS_SIMGEN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cis/dataset.hpp"
#include "cis/error.hpp"
#include "cis/io.hpp"
#include "cis/rng.hpp"
#include "json.hpp"

namespace cis {

enum class CorrelationKind { CompoundSymmetry, AutoRegressive };

inline std::string to_string(CorrelationKind kind) {
  return kind == CorrelationKind::CompoundSymmetry ? "CS" : "AR1";
}

// Contiguous features [first, first + size) sharing one correlation structure.
struct CorrelationBlock {
  Index first = 0;
  Index size = 0;
  CorrelationKind kind = CorrelationKind::CompoundSymmetry;
  double rho = 0.0;

  Eigen::MatrixXd covariance() const {
    Eigen::MatrixXd c(size, size);
    for (Index i = 0; i < size; ++i)
      for (Index j = 0; j < size; ++j)
        c(i, j) = i == j ? 1.0
                         : (kind == CorrelationKind::CompoundSymmetry
                                ? rho
                                : std::pow(rho, static_cast<double>(std::abs(i - j))));
    return c;
  }
};

// Gaussian class model: common block-diagonal correlation, class means given
// for the leading mean_table.cols() features and zero elsewhere.
struct SimDesign {
  int example = 0;  // 0 for custom designs
  Index p = 0;
  Index n_per_class = 0;
  Index n_test_per_class = 0;
  std::vector<CorrelationBlock> blocks;
  Eigen::MatrixXd mean_table;  // K x informative count
  std::uint64_t seed = 0;

  int classes() const { return static_cast<int>(mean_table.rows()); }

  void validate() const {
    if (mean_table.rows() < 2) throw InvalidData("design needs at least two classes");
    if (mean_table.cols() > p) throw InvalidData("mean table wider than p");
    if (n_per_class < 2) throw InvalidData("n_per_class must be at least 2");
    if (n_test_per_class < 0) throw InvalidData("n_test_per_class must be nonnegative");
    std::vector<std::pair<Index, Index>> spans;
    for (const auto& b : blocks) {
      if (b.size < 1 || b.first < 0 || b.first + b.size > p)
        throw InvalidData("correlation block outside 1..p");
      if (!(std::abs(b.rho) < 1.0)) throw InvalidData("block correlation must lie in (-1, 1)");
      spans.emplace_back(b.first, b.first + b.size);
    }
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i)
      if (spans[i].first < spans[i - 1].second) throw InvalidData("correlation blocks overlap");
  }

  // Block containing feature j, or nullptr.
  const CorrelationBlock* block_of(Index j) const {
    for (const auto& b : blocks)
      if (j >= b.first && j < b.first + b.size) return &b;
    return nullptr;
  }

  Eigen::VectorXd class_mean(int k) const {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
    mu.head(mean_table.cols()) = mean_table.row(k - 1).transpose();
    return mu;
  }
};

// Informative features of one class pair.
struct GroundTruth {
  ClassPair pair;
  FeatureSet informative_set;  // S_0
  FeatureSet marginal_set;     // nonzero mean difference
  FeatureSet muji_set;         // zero mean difference, linked through a block
};

// Mean layout shared by all three numerical examples (4 blocks of 5).
inline Eigen::MatrixXd example_mean_table() {
  Eigen::MatrixXd m(3, 20);
  for (Index base : {Index{0}, Index{10}}) {
    for (Index j = 0; j < 4; ++j) m.col(base + j) << 0.0, 0.0, -2.5;
    m.col(base + 4) << -0.5, 2.0, -2.5;
    for (Index j = 5; j < 10; ++j) m.col(base + j) << 1.5, -1.5, -1.5;
  }
  return m;
}

inline SimDesign example_design(int which, Index p, Index n_per_class, std::uint64_t seed,
                                Index n_test_per_class = 50) {
  if (which < 1 || which > 3) throw UnknownExample(which);
  if (p < 20) throw InvalidData("examples need p >= 20");
  SimDesign d;
  d.example = which;
  d.p = p;
  d.n_per_class = n_per_class;
  d.n_test_per_class = n_test_per_class;
  d.seed = seed;
  const auto kind = which == 2 ? CorrelationKind::AutoRegressive : CorrelationKind::CompoundSymmetry;
  for (Index b = 0; b < 4; ++b) d.blocks.push_back({5 * b, 5, kind, 0.5});
  d.mean_table = example_mean_table();
  d.validate();
  return d;
}

// Marginal features differ in mean; MUJI features share a correlation block
// with a marginal feature while having equal means.
inline GroundTruth ground_truth(const SimDesign& design, const ClassPair& pair) {
  GroundTruth t;
  t.pair = pair;
  const Eigen::VectorXd delta = design.class_mean(pair.first) - design.class_mean(pair.second);
  std::vector<char> marginal(static_cast<std::size_t>(design.p), 0);
  for (Index j = 0; j < design.p; ++j)
    if (delta(j) != 0.0) {
      marginal[static_cast<std::size_t>(j)] = 1;
      t.marginal_set.push_back(j);
    }
  for (const auto& b : design.blocks) {
    bool linked = false;
    for (Index j = b.first; j < b.first + b.size; ++j) linked = linked || marginal[static_cast<std::size_t>(j)];
    if (!linked || b.rho == 0.0) continue;
    for (Index j = b.first; j < b.first + b.size; ++j)
      if (!marginal[static_cast<std::size_t>(j)]) t.muji_set.push_back(j);
  }
  std::sort(t.muji_set.begin(), t.muji_set.end());
  std::merge(t.marginal_set.begin(), t.marginal_set.end(), t.muji_set.begin(), t.muji_set.end(),
             std::back_inserter(t.informative_set));
  return t;
}

// Exact Sigma^{-1} delta of the design (block-wise solve).
inline Eigen::VectorXd precision_times_delta(const SimDesign& design, const ClassPair& pair) {
  Eigen::VectorXd delta = design.class_mean(pair.first) - design.class_mean(pair.second);
  Eigen::VectorXd out = delta;
  for (const auto& b : design.blocks) {
    Eigen::LLT<Eigen::MatrixXd> llt(b.covariance());
    if (llt.info() != Eigen::Success) throw NonPositiveDefiniteBlock("block covariance not positive definite");
    out.segment(b.first, b.size) = llt.solve(delta.segment(b.first, b.size));
  }
  return out;
}

// Features whose exact precision-weighted mean difference is nonzero.
inline FeatureSet condition_a_set(const SimDesign& design, const ClassPair& pair, double tol = 1e-12) {
  const Eigen::VectorXd w = precision_times_delta(design, pair);
  FeatureSet out;
  for (Index j = 0; j < design.p; ++j)
    if (std::abs(w(j)) > tol) out.push_back(j);
  return out;
}

// Mahalanobis distance between the two class means under the design covariance.
inline double oracle_delta_p(const SimDesign& design, const ClassPair& pair) {
  design.validate();
  if (pair.first < 1 || pair.second < 1 || pair.first > design.classes() ||
      pair.second > design.classes() || pair.first == pair.second)
    throw InvalidData("invalid class pair " + to_string(pair));
  const Eigen::VectorXd delta = design.class_mean(pair.first) - design.class_mean(pair.second);
  return std::sqrt(delta.dot(precision_times_delta(design, pair)));
}

struct SimSample {
  LabeledMatrix train;
  LabeledMatrix test;
  std::vector<GroundTruth> truths;  // one per unordered class pair

  const GroundTruth& truth(const ClassPair& pair) const {
    for (const auto& t : truths)
      if (t.pair == pair) return t;
    throw InvalidData("no ground truth for pair " + to_string(pair));
  }
};

namespace detail {

inline LabeledMatrix draw_split(const SimDesign& design, Index per_class,
                                const std::vector<Eigen::MatrixXd>& factors, Rng& rng) {
  const int K = design.classes();
  const Index n = per_class * K;
  Eigen::MatrixXd x(n, design.p);
  std::vector<int> labels(static_cast<std::size_t>(n));
  Eigen::VectorXd z(design.p);
  for (int k = 1; k <= K; ++k) {
    const Eigen::VectorXd mu = design.class_mean(k);
    for (Index r = 0; r < per_class; ++r) {
      const Index i = (k - 1) * per_class + r;
      for (Index j = 0; j < design.p; ++j) z(j) = rng.normal();
      for (std::size_t b = 0; b < design.blocks.size(); ++b) {
        const auto& blk = design.blocks[b];
        z.segment(blk.first, blk.size) = (factors[b] * z.segment(blk.first, blk.size)).eval();
      }
      x.row(i) = (z + mu).transpose();
      labels[static_cast<std::size_t>(i)] = k;
    }
  }
  return LabeledMatrix::from_raw(std::move(x), labels, {}, 1);
}

}  // namespace detail

// Draws train and test splits; equal designs give bit-identical output.
inline SimSample sample(const SimDesign& design) {
  design.validate();
  std::vector<Eigen::MatrixXd> factors;
  for (const auto& b : design.blocks) {
    Eigen::LLT<Eigen::MatrixXd> llt(b.covariance());
    if (llt.info() != Eigen::Success)
      throw NonPositiveDefiniteBlock("Cholesky failed for block starting at feature " +
                                     std::to_string(b.first + 1));
    factors.emplace_back(llt.matrixL());
  }
  Rng rng(design.seed);
  SimSample s;
  s.train = detail::draw_split(design, design.n_per_class, factors, rng);
  if (design.n_test_per_class > 0)
    s.test = detail::draw_split(design, design.n_test_per_class, factors, rng);
  for (int a = 1; a <= design.classes(); ++a)
    for (int b = a + 1; b <= design.classes(); ++b) s.truths.push_back(ground_truth(design, {a, b}));
  return s;
}

// JSON layout uses 1-based inclusive feature ranges.
inline nlohmann::json to_json(const SimDesign& d) {
  nlohmann::json j;
  j["example"] = d.example;
  j["p"] = d.p;
  j["n_per_class"] = d.n_per_class;
  j["n_test_per_class"] = d.n_test_per_class;
  j["seed"] = d.seed;
  j["blocks"] = nlohmann::json::array();
  for (const auto& b : d.blocks)
    j["blocks"].push_back({{"first", b.first + 1}, {"last", b.first + b.size}, {"kind", to_string(b.kind)}, {"rho", b.rho}});
  j["mean_table"] = nlohmann::json::array();
  for (Index k = 0; k < d.mean_table.rows(); ++k) {
    std::vector<double> row;
    for (Index c = 0; c < d.mean_table.cols(); ++c) row.push_back(d.mean_table(k, c));
    j["mean_table"].push_back(row);
  }
  return j;
}

inline SimDesign design_from_json(const nlohmann::json& j) {
  SimDesign d;
  d.example = j.value("example", 0);
  if (d.example != 0 && !j.contains("blocks")) {
    d = example_design(d.example, j.value("p", Index{10000}), j.value("n_per_class", Index{100}),
                       j.value("seed", std::uint64_t{1}), j.value("n_test_per_class", Index{50}));
    return d;
  }
  d.p = j.at("p").get<Index>();
  d.n_per_class = j.value("n_per_class", Index{100});
  d.n_test_per_class = j.value("n_test_per_class", Index{50});
  d.seed = j.value("seed", std::uint64_t{1});
  for (const auto& b : j.at("blocks")) {
    CorrelationBlock blk;
    blk.first = b.at("first").get<Index>() - 1;
    blk.size = b.at("last").get<Index>() - blk.first;
    const auto kind = b.at("kind").get<std::string>();
    if (kind == "CS") blk.kind = CorrelationKind::CompoundSymmetry;
    else if (kind == "AR1") blk.kind = CorrelationKind::AutoRegressive;
    else throw InvalidData("unknown correlation kind '" + kind + "'");
    blk.rho = b.at("rho").get<double>();
    d.blocks.push_back(blk);
  }
  const auto& table = j.at("mean_table");
  const Index K = static_cast<Index>(table.size());
  const Index cols = K ? static_cast<Index>(table[0].size()) : 0;
  d.mean_table.resize(K, cols);
  for (Index k = 0; k < K; ++k) {
    if (static_cast<Index>(table[static_cast<std::size_t>(k)].size()) != cols)
      throw InvalidData("ragged mean_table");
    for (Index c = 0; c < cols; ++c) d.mean_table(k, c) = table[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)].get<double>();
  }
  d.validate();
  return d;
}

// One row per informative feature of each pair; indices are 1-based.
inline std::string truth_csv(const std::vector<GroundTruth>& truths) {
  io::CsvWriter w({"pair", "feature", "type"});
  for (const auto& t : truths) {
    std::vector<char> muji(t.informative_set.empty() ? 0 : static_cast<std::size_t>(t.informative_set.back()) + 1, 0);
    for (Index j : t.muji_set) muji[static_cast<std::size_t>(j)] = 1;
    for (Index j : t.informative_set)
      w.row({to_string(t.pair), std::to_string(j + 1), muji[static_cast<std::size_t>(j)] ? "muji" : "marginal"});
  }
  return w.str();
}

inline ClassPair parse_pair(std::string_view text) {
  const auto parts = io::split(text, '-');
  if (parts.size() != 2) throw InvalidData("class pair '" + std::string(text) + "' is not of the form a-b");
  const ClassPair pair{static_cast<int>(io::parse_long(parts[0], "class pair")),
                       static_cast<int>(io::parse_long(parts[1], "class pair"))};
  if (pair.first < 1 || pair.second < 1 || pair.first == pair.second)
    throw InvalidData("class pair '" + std::string(text) + "' needs two distinct positive ids");
  return pair;
}

inline std::vector<GroundTruth> read_truth_csv(const std::filesystem::path& path) {
  const std::string text = io::read_file(path);
  auto lines = io::split(text, '\n');
  if (!lines.empty() && !lines[0].empty() && lines[0].back() == '\r') lines[0].remove_suffix(1);
  if (lines.empty() || lines[0] != "pair,feature,type")
    throw IoError(path.string() + ": header must be 'pair,feature,type'");
  std::vector<GroundTruth> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const std::string ctx = path.string() + ":" + std::to_string(i + 1);
    const auto cells = io::split(line);
    if (cells.size() != 3) throw IoError(ctx + ": expected 3 columns");
    const ClassPair pair = parse_pair(cells[0]);
    const Index j = io::parse_long(cells[1], ctx) - 1;
    if (j < 0) throw IoError(ctx + ": feature index must be positive");
    auto it = std::find_if(out.begin(), out.end(), [&](const GroundTruth& t) { return t.pair == pair; });
    if (it == out.end()) {
      out.push_back({});
      out.back().pair = pair;
      it = out.end() - 1;
    }
    it->informative_set.push_back(j);
    if (cells[2] == "muji") it->muji_set.push_back(j);
    else if (cells[2] == "marginal") it->marginal_set.push_back(j);
    else throw IoError(ctx + ": type must be 'marginal' or 'muji'");
  }
  for (auto& t : out)
    for (auto* v : {&t.informative_set, &t.marginal_set, &t.muji_set}) std::sort(v->begin(), v->end());
  return out;
}

}  // namespace cis

#endif  // CIS_SIMGEN_HPP
