#ifndef CIS_TUNING_HPP
#define CIS_TUNING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cis/dataset.hpp"
#include "cis/error.hpp"
#include "cis/io.hpp"
#include "cis/parallel.hpp"
#include "cis/pipeline.hpp"
#include "cis/rng.hpp"
#include "cis/stats.hpp"

namespace cis {

struct CvPlan {
  int folds = 5;
  std::vector<double> tau_grid;  // empty: quantiles of |mean difference|
  std::vector<double> alpha_grid{0.2};
  std::uint64_t seed = 1;

  void validate() const {
    if (folds < 2) throw InvalidData("cross-validation needs at least 2 folds");
    if (alpha_grid.empty()) throw InvalidData("alpha grid is empty");
    for (double t : tau_grid)
      if (!(t >= 0.0)) throw InvalidData("tau grid values must be nonnegative");
  }
};

inline constexpr double kEmptySelectionError = 0.5;
inline constexpr double kDefaultTauQuantiles[] = {0.80, 0.90, 0.95, 0.99};

inline std::vector<double> default_tau_grid(const Eigen::VectorXd& mean_difference) {
  std::vector<double> a(mean_difference.data(), mean_difference.data() + mean_difference.size());
  for (double& v : a) v = std::abs(v);
  std::vector<double> grid;
  for (double q : kDefaultTauQuantiles) grid.push_back(stats::quantile(a, q));
  return grid;
}

// Fold id per row. Each class is shuffled and dealt round-robin, continuing
// the deal across classes, so every fold holds floor or ceil of n_k / folds
// rows of class k.
inline std::vector<int> stratified_folds(const LabeledMatrix& data, int folds, std::uint64_t seed) {
  if (folds < 2) throw InvalidData("cross-validation needs at least 2 folds");
  std::vector<int> fold(static_cast<std::size_t>(data.rows()), -1);
  Rng rng(seed);
  std::size_t deal = 0;
  for (int k = 1; k <= data.classes(); ++k) {
    auto rows = data.rows_of_class(k);
    if (rows.empty()) continue;
    if (static_cast<int>(rows.size()) < folds)
      throw FoldTooSmall("class " + std::to_string(data.label_ids()[static_cast<std::size_t>(k - 1)]) + " has " +
                         std::to_string(rows.size()) + " rows for " + std::to_string(folds) + " folds");
    rng.shuffle(rows.begin(), rows.end());
    for (Index r : rows) fold[static_cast<std::size_t>(r)] = static_cast<int>(deal++ % static_cast<std::size_t>(folds));
  }
  return fold;
}

struct CvRow {
  double tau = 0.0;
  double alpha = 0.0;
  double mean_error = 0.0;
  std::vector<double> fold_error;
  int empty_folds = 0;
  double mean_selected = 0.0;
};

struct CvResult {
  ClassPair pair;
  Method method = Method::CIS;
  double tau = 0.0;
  double alpha = 0.0;
  std::vector<CvRow> table;  // alpha-major, then tau in grid order
};

namespace detail {

// Smallest mean error; ties go to smaller tau, then larger alpha.
inline std::size_t best_row(const std::vector<CvRow>& table) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& a = table[i];
    const auto& b = table[best];
    constexpr double tol = 1e-12;
    if (a.mean_error < b.mean_error - tol) {
      best = i;
    } else if (std::abs(a.mean_error - b.mean_error) <= tol) {
      if (a.tau < b.tau || (a.tau == b.tau && a.alpha > b.alpha)) best = i;
    }
  }
  return best;
}

}  // namespace detail

// Grid search over (tau, alpha) for several pairs sharing folds. Each fold
// complement is standardized on its own, so held-out rows never inform
// scaling, graph or means. MS ignores alpha_grid and uses base.alpha.
inline std::vector<CvResult> cross_validate(const LabeledMatrix& raw, std::span<const ClassPair> pairs,
                                            const CvPlan& plan, const ScreeningConfig& base, Method method,
                                            GraphRows rows = GraphRows::AllClasses, unsigned threads = 1) {
  plan.validate();
  const std::vector<int> fold = stratified_folds(raw, plan.folds, plan.seed);
  const std::vector<double> alphas = method == Method::MS ? std::vector<double>{base.alpha} : plan.alpha_grid;

  std::vector<std::vector<double>> taus(pairs.size());
  if (plan.tau_grid.empty()) {
    std::optional<PreparedTrain> shared;
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      if (rows == GraphRows::AllClasses) {
        if (!shared) shared = prepare(raw, base.centering);
        taus[q] = default_tau_grid(shared->summary.mean_difference(pairs[q]));
      } else {
        taus[q] = default_tau_grid(prepare(raw, pairs[q], rows, base.centering).summary.mean_difference(pairs[q]));
      }
    }
  } else {
    for (auto& t : taus) t = plan.tau_grid;
  }

  // errors[(f * A + a)][q][t], selected counts alongside
  const std::size_t A = alphas.size();
  const std::size_t units = static_cast<std::size_t>(plan.folds) * A;
  std::vector<std::vector<std::vector<double>>> errors(units), sizes(units);

  parallel_for(units, threads, [&](std::size_t u) {
    const int f = static_cast<int>(u / A);
    const double alpha = alphas[u % A];
    std::vector<Index> fit_rows, held_rows;
    for (Index i = 0; i < raw.rows(); ++i) (fold[static_cast<std::size_t>(i)] == f ? held_rows : fit_rows).push_back(i);
    const LabeledMatrix fit_data = raw.subset(fit_rows);
    const LabeledMatrix held = raw.subset(held_rows);

    std::optional<PreparedTrain> shared;
    std::optional<LazyCorrelationGraph> shared_graph;
    errors[u].resize(pairs.size());
    sizes[u].resize(pairs.size());
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      std::optional<PreparedTrain> own;
      std::optional<LazyCorrelationGraph> own_graph;
      const PreparedTrain* t;
      const LazyCorrelationGraph* g = nullptr;
      if (rows == GraphRows::AllClasses) {
        if (!shared) {
          shared = prepare(fit_data, base.centering);
          if (method == Method::CIS) shared_graph.emplace(shared->basis, alpha);
        }
        t = &*shared;
        if (shared_graph) g = &*shared_graph;
      } else {
        own = prepare(fit_data, pairs[q], rows, base.centering);
        if (method == Method::CIS) own_graph.emplace(own->basis, alpha);
        t = &*own;
        if (own_graph) g = &*own_graph;
      }
      for (double tau : taus[q]) {
        ScreeningConfig cfg = base;
        cfg.tau = tau;
        cfg.alpha = alpha;
        const PairOutcome o = method == Method::CIS ? run_cis(*t, *g, pairs[q], cfg) : run_ms(*t, pairs[q], cfg);
        errors[u][q].push_back(o.model ? misclassification_rate(*o.model, held) : kEmptySelectionError);
        sizes[u][q].push_back(static_cast<double>(o.selected.size()));
      }
    }
  });

  std::vector<CvResult> out(pairs.size());
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    out[q].pair = pairs[q];
    out[q].method = method;
    for (std::size_t a = 0; a < A; ++a)
      for (std::size_t t = 0; t < taus[q].size(); ++t) {
        CvRow row;
        row.tau = taus[q][t];
        row.alpha = alphas[a];
        std::vector<double> sel;
        for (int f = 0; f < plan.folds; ++f) {
          const std::size_t u = static_cast<std::size_t>(f) * A + a;
          row.fold_error.push_back(errors[u][q][t]);
          sel.push_back(sizes[u][q][t]);
          if (sizes[u][q][t] == 0.0) ++row.empty_folds;
        }
        row.mean_error = stats::mean(row.fold_error);
        row.mean_selected = stats::mean(sel);
        out[q].table.push_back(std::move(row));
      }
    const auto& best = out[q].table[detail::best_row(out[q].table)];
    out[q].tau = best.tau;
    out[q].alpha = best.alpha;
  }
  return out;
}

inline CvResult cross_validate(const LabeledMatrix& raw, const ClassPair& pair, const CvPlan& plan,
                               const ScreeningConfig& base, Method method = Method::CIS,
                               GraphRows rows = GraphRows::AllClasses, unsigned threads = 1) {
  return cross_validate(raw, std::span<const ClassPair>(&pair, 1), plan, base, method, rows, threads).front();
}

inline std::string cv_table_csv(const std::vector<CvResult>& results) {
  io::CsvWriter w({"method", "pair", "alpha", "tau", "mean_error", "empty_folds", "mean_selected", "chosen"});
  for (const auto& r : results)
    for (const auto& row : r.table)
      w.row({to_string(r.method), to_string(r.pair), io::format_double(row.alpha), io::format_double(row.tau),
             io::format_double(row.mean_error), std::to_string(row.empty_folds), io::format_double(row.mean_selected),
             row.tau == r.tau && row.alpha == r.alpha ? "1" : "0"});
  return w.str();
}

// Row indices of a bootstrap resample drawn separately within each class.
inline std::vector<Index> stratified_bootstrap(const LabeledMatrix& data, Rng& rng) {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(data.rows()));
  for (int k = 1; k <= data.classes(); ++k) {
    const auto rows = data.rows_of_class(k);
    for (std::size_t i = 0; i < rows.size(); ++i) out.push_back(rows[rng.below(rows.size())]);
  }
  return out;
}

struct StabilityReport {
  ClassPair pair;
  int n_bootstrap = 0;
  Eigen::VectorXd frequency;  // fraction of resamples selecting each feature
};

// Resample b uses Rng(derive_seed(plan.seed, b)); each resample is tuned by
// cross-validation with `plan` and then screened on the whole resample.
inline StabilityReport stability_frequencies(const LabeledMatrix& raw, const ClassPair& pair, int n_bootstrap,
                                             const CvPlan& plan, const ScreeningConfig& base,
                                             Method method = Method::CIS, GraphRows rows = GraphRows::AllClasses,
                                             unsigned threads = 1) {
  if (n_bootstrap < 1) throw InvalidData("n_bootstrap must be at least 1");
  std::vector<FeatureSet> picked(static_cast<std::size_t>(n_bootstrap));
  parallel_for(picked.size(), threads, [&](std::size_t b) {
    Rng rng(derive_seed(plan.seed, b));
    const LabeledMatrix resample = raw.subset(stratified_bootstrap(raw, rng));
    const CvResult cv = cross_validate(resample, pair, plan, base, method, rows, 1);
    ScreeningConfig cfg = base;
    cfg.tau = cv.tau;
    cfg.alpha = cv.alpha;
    picked[b] = fit_method(resample, pair, method, cfg, rows).selected;
  });
  StabilityReport r;
  r.pair = pair;
  r.n_bootstrap = n_bootstrap;
  r.frequency = Eigen::VectorXd::Zero(raw.cols());
  for (const auto& s : picked)
    for (Index j : s) r.frequency(j) += 1.0;
  r.frequency /= static_cast<double>(n_bootstrap);
  return r;
}

inline std::string stability_csv(const StabilityReport& r) {
  io::CsvWriter w({"feature", "frequency"});
  for (Index j = 0; j < r.frequency.size(); ++j) w.row({std::to_string(j + 1), io::format_double(r.frequency(j))});
  return w.str();
}

}  // namespace cis

#endif  // CIS_TUNING_HPP
