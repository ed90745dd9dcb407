#ifndef CIS_EVALUATION_HPP
#define CIS_EVALUATION_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cis/classifier.hpp"
#include "cis/io.hpp"
#include "cis/parallel.hpp"
#include "cis/pipeline.hpp"
#include "cis/rng.hpp"
#include "cis/simgen.hpp"
#include "cis/stats.hpp"
#include "cis/tuning.hpp"

namespace cis {

struct ScreenMetrics {
  Index fp = 0;
  Index fn = 0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  Index mms = 0;  // p + 1 when an informative feature is unranked
  double er_percent = std::numeric_limits<double>::quiet_NaN();
};

// `ranking` lists scored features best first; unscored features are absent.
inline ScreenMetrics screen_metrics(const FeatureSet& selected, const FeatureSet& ranking, const GroundTruth& truth,
                                    Index p) {
  std::vector<char> informative(static_cast<std::size_t>(p), 0);
  for (Index j : truth.informative_set) informative[static_cast<std::size_t>(j)] = 1;
  const Index s0 = static_cast<Index>(truth.informative_set.size());
  ScreenMetrics m;
  Index tp = 0;
  for (Index j : selected) (informative[static_cast<std::size_t>(j)] ? tp : m.fp) += 1;
  m.fn = s0 - tp;
  m.sensitivity = s0 > 0 ? static_cast<double>(tp) / static_cast<double>(s0) : 1.0;
  m.specificity = p > s0 ? static_cast<double>(p - s0 - m.fp) / static_cast<double>(p - s0) : 1.0;

  Index found = 0;
  m.mms = p + 1;
  if (s0 == 0) m.mms = 0;
  for (std::size_t k = 0; k < ranking.size() && found < s0; ++k)
    if (informative[static_cast<std::size_t>(ranking[k])] && ++found == s0) m.mms = static_cast<Index>(k) + 1;
  return m;
}

struct BenchConfig {
  int example = 1;
  Index p = 10000;
  Index n_per_class = 100;
  Index n_test_per_class = 50;
  std::vector<double> alphas{0.2};
  int depth = 10;
  int replicates = 50;
  std::uint64_t seed = 1;
  std::vector<double> tau_grid{0.5, 1.0, 1.5, 2.0};  // empty: quantile default
  int folds = 5;
  std::vector<ClassPair> pairs{{1, 2}, {2, 3}};
  bool include_ms = true;
  GraphRows graph_rows = GraphRows::AllClasses;
  std::optional<Index> max_block;
  IndefinitePolicy indefinite = IndefinitePolicy::ShrinkDepth;
  Centering centering = Centering::PooledWithinClass;
  double ridge_eps = 1e-6;
  SelectionRule selection = SelectionRule::top_n();
  unsigned threads = 0;

  void validate() const {
    if (replicates < 1) throw InvalidData("replicates must be at least 1");
    if (alphas.empty()) throw InvalidData("alpha list is empty");
    if (depth < 1) throw InvalidData("depth must be at least 1");
    if (pairs.empty()) throw InvalidData("pair list is empty");
  }
};

struct ReplicateRecord {
  int replicate = 0;
  std::uint64_t seed = 0;
  Method method = Method::CIS;
  ClassPair pair;
  double alpha = std::numeric_limits<double>::quiet_NaN();  // NaN for MS
  double tau = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
  std::string error;
  ScreenMetrics metrics;
  Index selected = 0;
  int depth_reached = 0;
  bool truncated = false;
  std::size_t ridge_fallbacks = 0;
};

struct Aggregate {
  Method method = Method::CIS;
  ClassPair pair;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  int ok = 0;
  int failed = 0;
  double fp_mean = 0, fp_se = 0, fn_mean = 0, fn_se = 0, se_mean = 0, se_se = 0, sp_mean = 0, sp_se = 0;
  double er_mean = 0, er_se = 0, mms_median = 0, mms_iqr = 0;
};

struct BenchReport {
  BenchConfig config;
  std::vector<ReplicateRecord> records;
  std::vector<Aggregate> aggregates;
};

namespace detail {

inline void fill_record(ReplicateRecord& rec, const PairOutcome& o, const GroundTruth& truth, const LabeledMatrix& test,
                        Index p) {
  rec.metrics = screen_metrics(o.selected, o.ranking, truth, p);
  rec.metrics.er_percent = 100.0 * (o.model ? misclassification_rate(*o.model, test) : kEmptySelectionError);
  rec.selected = static_cast<Index>(o.selected.size());
  if (o.screening) {
    rec.depth_reached = o.screening->depth_reached;
    rec.truncated = o.screening->truncated;
    rec.ridge_fallbacks = o.screening->ridge_fallbacks();
  }
  rec.ok = true;
}

inline std::vector<ReplicateRecord> run_replicate(const BenchConfig& c, int r) {
  const std::uint64_t seed = derive_seed(c.seed, static_cast<std::uint64_t>(r));
  const SimDesign design = example_design(c.example, c.p, c.n_per_class, seed, c.n_test_per_class);

  std::vector<ReplicateRecord> recs;
  auto stub = [&](Method m, const ClassPair& pair, double alpha) {
    ReplicateRecord rec;
    rec.replicate = r;
    rec.seed = seed;
    rec.method = m;
    rec.pair = pair;
    rec.alpha = alpha;
    return rec;
  };
  for (double a : c.alphas)
    for (const auto& pair : c.pairs) recs.push_back(stub(Method::CIS, pair, a));
  if (c.include_ms)
    for (const auto& pair : c.pairs) recs.push_back(stub(Method::MS, pair, std::numeric_limits<double>::quiet_NaN()));

  try {
    const SimSample s = sample(design);
    ScreeningConfig base;
    base.depth = c.depth;
    base.max_block = c.max_block;
    base.indefinite = c.indefinite;
    base.centering = c.centering;
    base.ridge_eps = c.ridge_eps;
    base.selection = c.selection;
    CvPlan plan;
    plan.folds = c.folds;
    plan.tau_grid = c.tau_grid;
    plan.seed = seed;

    std::optional<PreparedTrain> shared;
    if (c.graph_rows == GraphRows::AllClasses) shared = prepare(s.train, base.centering);
    std::size_t k = 0;
    for (double a : c.alphas) {
      plan.alpha_grid = {a};
      base.alpha = a;
      const auto cv = cross_validate(s.train, c.pairs, plan, base, Method::CIS, c.graph_rows, 1);
      std::optional<LazyCorrelationGraph> graph;
      if (shared) graph.emplace(shared->basis, a);
      for (std::size_t q = 0; q < c.pairs.size(); ++q, ++k) {
        ScreeningConfig cfg = base;
        cfg.tau = cv[q].tau;
        const PairOutcome o = shared ? run_cis(*shared, *graph, c.pairs[q], cfg)
                                     : fit_method(s.train, c.pairs[q], Method::CIS, cfg, c.graph_rows);
        recs[k].tau = cfg.tau;
        fill_record(recs[k], o, s.truth(c.pairs[q]), s.test, c.p);
      }
    }
    if (c.include_ms) {
      base.alpha = c.alphas.front();
      plan.alpha_grid = {base.alpha};
      const auto cv = cross_validate(s.train, c.pairs, plan, base, Method::MS, c.graph_rows, 1);
      for (std::size_t q = 0; q < c.pairs.size(); ++q, ++k) {
        ScreeningConfig cfg = base;
        cfg.tau = cv[q].tau;
        const PairOutcome o = shared ? run_ms(*shared, c.pairs[q], cfg)
                                     : fit_method(s.train, c.pairs[q], Method::MS, cfg, c.graph_rows);
        recs[k].tau = cfg.tau;
        fill_record(recs[k], o, s.truth(c.pairs[q]), s.test, c.p);
      }
    }
  } catch (const std::exception& e) {
    for (auto& rec : recs)
      if (!rec.ok) rec.error = e.what();
  }
  return recs;
}

inline bool same_alpha(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace detail

// Aggregates use successful replicates only: mean and standard error
// sd / sqrt(R) for FP, FN, se, sp, ER; median and IQR (type 7) for MMS.
inline std::vector<Aggregate> aggregate(const BenchConfig& c, const std::vector<ReplicateRecord>& records) {
  std::vector<Aggregate> out;
  auto add = [&](Method m, const ClassPair& pair, double alpha) {
    Aggregate g;
    g.method = m;
    g.pair = pair;
    g.alpha = alpha;
    std::vector<double> fp, fn, se, sp, er, mms;
    for (const auto& r : records) {
      if (r.method != m || !(r.pair == pair) || !detail::same_alpha(r.alpha, alpha)) continue;
      if (!r.ok) {
        ++g.failed;
        continue;
      }
      ++g.ok;
      fp.push_back(static_cast<double>(r.metrics.fp));
      fn.push_back(static_cast<double>(r.metrics.fn));
      se.push_back(r.metrics.sensitivity);
      sp.push_back(r.metrics.specificity);
      er.push_back(r.metrics.er_percent);
      mms.push_back(static_cast<double>(r.metrics.mms));
    }
    g.fp_mean = stats::mean(fp), g.fp_se = stats::standard_error(fp);
    g.fn_mean = stats::mean(fn), g.fn_se = stats::standard_error(fn);
    g.se_mean = stats::mean(se), g.se_se = stats::standard_error(se);
    g.sp_mean = stats::mean(sp), g.sp_se = stats::standard_error(sp);
    g.er_mean = stats::mean(er), g.er_se = stats::standard_error(er);
    g.mms_median = stats::median(mms), g.mms_iqr = stats::iqr(mms);
    out.push_back(g);
  };
  for (double a : c.alphas)
    for (const auto& pair : c.pairs) add(Method::CIS, pair, a);
  if (c.include_ms)
    for (const auto& pair : c.pairs) add(Method::MS, pair, std::numeric_limits<double>::quiet_NaN());
  return out;
}

// Replicate r uses design seed derive_seed(config.seed, r); replicates run in
// parallel and are merged in index order.
inline BenchReport run_benchmark(const BenchConfig& config) {
  config.validate();
  std::vector<std::vector<ReplicateRecord>> per(static_cast<std::size_t>(config.replicates));
  parallel_for(per.size(), config.threads,
               [&](std::size_t r) { per[r] = detail::run_replicate(config, static_cast<int>(r)); });
  BenchReport rep;
  rep.config = config;
  for (auto& v : per) rep.records.insert(rep.records.end(), v.begin(), v.end());
  rep.aggregates = aggregate(config, rep.records);
  return rep;
}

namespace detail {

inline std::string alpha_cell(double a) { return std::isnan(a) ? std::string() : io::format_double(a); }

}  // namespace detail

inline std::string bench_report_csv(const BenchReport& rep) {
  io::CsvWriter w({"method", "pair", "alpha", "depth", "statistic", "estimate", "spread", "spread_kind",
                   "replicates", "failed"});
  for (const auto& g : rep.aggregates) {
    const std::string depth = g.method == Method::CIS ? std::to_string(rep.config.depth) : std::string();
    auto row = [&](const char* stat, double est, double spread, const char* kind) {
      w.row({to_string(g.method), to_string(g.pair), detail::alpha_cell(g.alpha), depth, stat, io::format_double(est),
             io::format_double(spread), kind, std::to_string(g.ok), std::to_string(g.failed)});
    };
    row("FP", g.fp_mean, g.fp_se, "se");
    row("FN", g.fn_mean, g.fn_se, "se");
    row("se", g.se_mean, g.se_se, "se");
    row("sp", g.sp_mean, g.sp_se, "se");
    row("MMS", g.mms_median, g.mms_iqr, "iqr");
    row("ER", g.er_mean, g.er_se, "se");
  }
  return w.str();
}

inline std::string bench_replicates_csv(const BenchReport& rep) {
  io::CsvWriter w({"replicate", "seed", "method", "pair", "alpha", "tau", "status", "fp", "fn", "sensitivity",
                   "specificity", "mms", "er_percent", "selected", "depth_reached", "truncated", "ridge_fallbacks",
                   "error"});
  for (const auto& r : rep.records) {
    const auto& m = r.metrics;
    w.row({std::to_string(r.replicate + 1), std::to_string(r.seed), to_string(r.method), to_string(r.pair),
           detail::alpha_cell(r.alpha), r.ok ? io::format_double(r.tau) : std::string(), r.ok ? "ok" : "failed",
           std::to_string(m.fp), std::to_string(m.fn), io::format_double(m.sensitivity),
           io::format_double(m.specificity), std::to_string(m.mms), io::format_double(m.er_percent),
           std::to_string(r.selected), std::to_string(r.depth_reached), r.truncated ? "1" : "0",
           std::to_string(r.ridge_fallbacks), r.error});
  }
  return w.str();
}

// Fixed-width table: mean (standard error) for FP, FN, se, sp and ER;
// median (IQR) for MMS.
inline std::string bench_table(const BenchReport& rep) {
  const auto& c = rep.config;
  std::string out = "Example " + std::to_string(c.example) + ", p = " + std::to_string(c.p) + ", n = " +
                    std::to_string(c.n_per_class) + "/class, m = " + std::to_string(c.depth) + ", " +
                    std::to_string(c.replicates) + " replicates\n";
  out += "mean (standard error = sd/sqrt(R)); MMS: median (IQR)\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-6s %-6s %-5s %-16s %-16s %-16s %-16s %-16s %-16s %s\n", "method", "alpha",
                "pair", "FP", "FN", "se", "sp", "MMS", "ER(%)", "failed");
  out += line;
  auto cell = [](double v, double s, int digits) {
    return io::format_fixed(v, digits) + " (" + io::format_fixed(s, digits) + ")";
  };
  for (const auto& g : rep.aggregates) {
    std::snprintf(line, sizeof line, "%-6s %-6s %-5s %-16s %-16s %-16s %-16s %-16s %-16s %d\n",
                  to_string(g.method).c_str(), std::isnan(g.alpha) ? "-" : io::format_fixed(g.alpha, 2).c_str(),
                  to_string(g.pair).c_str(), cell(g.fp_mean, g.fp_se, 2).c_str(), cell(g.fn_mean, g.fn_se, 2).c_str(),
                  cell(g.se_mean, g.se_se, 3).c_str(), cell(g.sp_mean, g.sp_se, 4).c_str(),
                  cell(g.mms_median, g.mms_iqr, 1).c_str(), cell(g.er_mean, g.er_se, 2).c_str(), g.failed);
    out += line;
  }
  return out;
}

}  // namespace cis

#endif  // CIS_EVALUATION_HPP
