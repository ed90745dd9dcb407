#ifndef CIS_PIPELINE_HPP
#define CIS_PIPELINE_HPP

#include <memory>
#include <optional>
#include <vector>

#include "cis/classifier.hpp"
#include "cis/covgraph.hpp"
#include "cis/dataset.hpp"
#include "cis/parallel.hpp"
#include "cis/screening.hpp"

namespace cis {

enum class Method { CIS, MS };

inline std::string to_string(Method m) { return m == Method::CIS ? "CIS" : "MS"; }

// Rows used for standardization and the correlation graph of a pair.
enum class GraphRows {
  AllClasses,  // every training row, centered within its own class
  PairOnly,    // only the two classes being compared
};

// Training data after standardization, ready for screening.
struct PreparedTrain {
  ColumnScaling scaling;
  LabeledMatrix standardized;
  ClassSummary summary;
  std::shared_ptr<const CorrelationBasis> basis;
};

inline PreparedTrain prepare(const LabeledMatrix& raw, Centering centering = Centering::PooledWithinClass) {
  PreparedTrain t;
  t.scaling = column_scaling(raw);
  t.standardized = apply_scaling(raw, t.scaling);
  t.summary = class_summaries(t.standardized, true);
  t.basis = std::make_shared<const CorrelationBasis>(t.standardized, centering);
  return t;
}

inline PreparedTrain prepare(const LabeledMatrix& raw, const ClassPair& pair, GraphRows rows,
                             Centering centering = Centering::PooledWithinClass) {
  if (rows == GraphRows::AllClasses) return prepare(raw, centering);
  const auto r = raw.rows_of_pair(pair);
  return prepare(raw.subset(r), centering);
}

inline Index pair_size(const ClassSummary& s, const ClassPair& pair) {
  return s.class_counts[static_cast<std::size_t>(pair.first - 1)] +
         s.class_counts[static_cast<std::size_t>(pair.second - 1)];
}

// Screening plus classifier for one pair; `model` is empty when nothing was
// selected.
struct PairOutcome {
  Method method = Method::CIS;
  ClassPair pair;
  FeatureSet selected;
  FeatureSet ranking;
  std::optional<ScreeningResult> screening;  // CIS only
  std::optional<FittedClassifier> model;
};

template <ThresholdGraph G>
PairOutcome run_cis(const PreparedTrain& t, const G& graph, const ClassPair& pair, const ScreeningConfig& cfg) {
  PairOutcome out;
  out.method = Method::CIS;
  out.pair = pair;
  ScreeningResult r = screen(graph, t.summary, pair, cfg);
  out.selected = r.selected;
  out.ranking = ranking(r.importance);
  if (!r.selected.empty()) out.model = fit_pair(t.standardized, t.scaling, pair, r);
  out.screening = std::move(r);
  return out;
}

inline PairOutcome run_ms(const PreparedTrain& t, const ClassPair& pair, const ScreeningConfig& cfg) {
  PairOutcome out;
  out.method = Method::MS;
  out.pair = pair;
  MarginalBaseline b = marginal_baseline(t.summary.mean_difference(pair), cfg.tau, cfg.selection,
                                         pair_size(t.summary, pair));
  out.selected = b.selected;
  out.ranking = std::move(b.ranking);
  if (!out.selected.empty()) out.model = fit_independence(t.standardized, t.scaling, pair, out.selected);
  return out;
}

// Full-data fit of one pair from raw training data.
inline PairOutcome fit_method(const LabeledMatrix& raw, const ClassPair& pair, Method method,
                              const ScreeningConfig& cfg, GraphRows rows = GraphRows::AllClasses) {
  const PreparedTrain t = prepare(raw, pair, rows, cfg.centering);
  if (method == Method::MS) return run_ms(t, pair, cfg);
  return run_cis(t, LazyCorrelationGraph(t.basis, cfg.alpha), pair, cfg);
}

inline std::vector<ClassPair> all_pairs(int classes) {
  std::vector<ClassPair> pairs;
  for (int a = 1; a <= classes; ++a)
    for (int b = a + 1; b <= classes; ++b) pairs.push_back({a, b});
  return pairs;
}

// Full-data fits of several pairs, in parallel; with AllClasses every pair
// shares one standardization and one graph.
inline std::vector<PairOutcome> fit_pairs(const LabeledMatrix& raw, const std::vector<ClassPair>& pairs,
                                          Method method, const ScreeningConfig& cfg,
                                          GraphRows rows = GraphRows::AllClasses, unsigned threads = 1) {
  std::vector<PairOutcome> out(pairs.size());
  std::optional<PreparedTrain> shared;
  std::optional<LazyCorrelationGraph> graph;
  if (rows == GraphRows::AllClasses) {
    shared = prepare(raw, cfg.centering);
    graph.emplace(shared->basis, cfg.alpha);
  }
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    if (!shared) out[i] = fit_method(raw, pairs[i], method, cfg, rows);
    else if (method == Method::MS) out[i] = run_ms(*shared, pairs[i], cfg);
    else out[i] = run_cis(*shared, *graph, pairs[i], cfg);
  });
  return out;
}

inline VotingEnsemble ensemble_of(const std::vector<PairOutcome>& outcomes, int classes) {
  VotingEnsemble e;
  e.classes = classes;
  for (const auto& o : outcomes) {
    if (!o.model) throw EmptySelection();
    e.members.push_back(*o.model);
  }
  e.validate();
  return e;
}

// One CIS model per unordered class pair.
inline VotingEnsemble fit_ensemble(const LabeledMatrix& raw, const ScreeningConfig& cfg,
                                   GraphRows rows = GraphRows::AllClasses, unsigned threads = 1) {
  auto outcomes = fit_pairs(raw, all_pairs(raw.classes()), Method::CIS, cfg, rows, threads);
  return ensemble_of(outcomes, raw.classes());
}

}  // namespace cis

#endif  // CIS_PIPELINE_HPP
