#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cis/cis.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Bad flag value or config entry; exits with status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Binds CLI options to fields. After parsing, config values fill every
// option that was not given on the command line.
class Options {
 public:
  explicit Options(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* add(const std::string& name, T& field, const std::string& help) {
    CLI::Option* opt = app_->add_option("--" + flag_of(name), field, help)->capture_default_str();
    const std::string key = key_of(name);
    bindings_.push_back({key, [opt, &field, key](const json& cfg) {
                           if (opt->count() == 0 && cfg.contains(key)) field = cfg.at(key).get<T>();
                         },
                         [&field, key](json& out) { out[key] = field; }});
    return opt;
  }

  CLI::Option* flag(const std::string& name, bool& field, const std::string& help) {
    CLI::Option* opt = app_->add_flag("--" + flag_of(name), field, help);
    const std::string key = key_of(name);
    bindings_.push_back({key, [opt, &field, key](const json& cfg) {
                           if (opt->count() == 0 && cfg.contains(key)) field = cfg.at(key).get<bool>();
                         },
                         [&field, key](json& out) { out[key] = field; }});
    return opt;
  }

  void resolve(const json& cfg) const {
    for (const auto& b : bindings_) {
      try {
        b.load(cfg);
      } catch (const json::exception& e) {
        throw UsageError("config key '" + b.key + "': " + e.what());
      }
    }
  }

  json snapshot() const {
    json out = json::object();
    for (const auto& b : bindings_) b.save(out);
    return out;
  }

 private:
  struct Binding {
    std::string key;
    std::function<void(const json&)> load;
    std::function<void(json&)> save;
  };

  static std::string flag_of(std::string s) {
    for (char& c : s)
      if (c == '_') c = '-';
    return s;
  }
  static std::string key_of(std::string s) {
    for (char& c : s)
      if (c == '-') c = '_';
    return s;
  }

  CLI::App* app_;
  std::vector<Binding> bindings_;
};

struct Common {
  std::string config;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out_dir = ".";
  double memory_budget_mb = 256.0;

  void bind(Options& o, CLI::App* app) {
    app->add_option("--config", config, "JSON config; flags override its values")->check(CLI::ExistingFile);
    o.add("seed", seed, "random seed");
    o.add("threads", threads, "worker threads, 0 = all cores");
    o.add("out-dir", out_dir, "output directory");
    o.add("memory-budget-mb", memory_budget_mb, "memory for dense correlation tiles");
  }

  std::size_t budget_bytes() const {
    if (!(memory_budget_mb > 0.0)) throw UsageError("--memory-budget-mb must be positive");
    return static_cast<std::size_t>(memory_budget_mb * 1024.0 * 1024.0);
  }
};

cis::Centering parse_centering(const std::string& s) {
  if (s == "pooled") return cis::Centering::PooledWithinClass;
  if (s == "plain") return cis::Centering::Plain;
  throw UsageError("--centering must be pooled or plain");
}

struct ScreenArgs {
  double tau = 1.0;
  double alpha = 0.2;
  int depth = 10;
  std::string select = "top_n";
  double nu = 0.0;
  cis::Index limit = 0;
  cis::Index max_block = 0;
  double ridge_eps = 1e-6;
  std::string graph_rows = "all";
  std::string indefinite = "shrink_depth";
  std::string centering = "pooled";

  void bind(Options& o) {
    o.add("tau", tau, "marginal threshold on |mean difference|");
    o.add("alpha", alpha, "correlation threshold");
    o.add("depth", depth, "subgraph depth m");
    o.add("select", select, "selection rule: top_n or threshold");
    o.add("nu", nu, "importance threshold for --select threshold");
    o.add("limit", limit, "TopN size, 0 = pair sample size");
    o.add("max-block", max_block, "largest inverted block, 0 = rows/10");
    o.add("ridge-eps", ridge_eps, "initial diagonal loading for singular blocks");
    o.add("graph-rows", graph_rows, "rows behind the graph: all or pair");
    o.add("indefinite", indefinite, "indefinite blocks: shrink_depth or lu");
    o.add("centering", centering, "correlation centering: pooled (within class) or plain");
  }

  cis::ScreeningConfig config() const {
    cis::ScreeningConfig c;
    if (!(tau >= 0.0)) throw UsageError("--tau must be nonnegative");
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
    if (depth < 1) throw UsageError("--depth must be at least 1");
    if (limit < 0 || max_block < 0) throw UsageError("--limit and --max-block must be nonnegative");
    c.tau = tau;
    c.alpha = alpha;
    c.depth = depth;
    c.ridge_eps = ridge_eps;
    if (select == "top_n") c.selection = cis::SelectionRule::top_n(limit);
    else if (select == "threshold") c.selection = cis::SelectionRule::threshold(nu);
    else throw UsageError("--select must be top_n or threshold");
    if (max_block > 0) c.max_block = max_block;
    c.indefinite = indefinite_policy();
    c.centering = parse_centering(centering);
    return c;
  }

  cis::GraphRows rows() const {
    if (graph_rows == "all") return cis::GraphRows::AllClasses;
    if (graph_rows == "pair") return cis::GraphRows::PairOnly;
    throw UsageError("--graph-rows must be all or pair");
  }

  cis::IndefinitePolicy indefinite_policy() const {
    if (indefinite == "shrink_depth") return cis::IndefinitePolicy::ShrinkDepth;
    if (indefinite == "lu") return cis::IndefinitePolicy::PivotedLU;
    throw UsageError("--indefinite must be shrink_depth or lu");
  }
};

cis::Method parse_method(const std::string& m) {
  if (m == "CIS") return cis::Method::CIS;
  if (m == "MS") return cis::Method::MS;
  throw UsageError("--method must be CIS or MS");
}

cis::ClassPair parse_pair(const std::string& s) {
  try {
    return cis::parse_pair(s);
  } catch (const cis::Error& e) {
    throw UsageError(e.what());
  }
}

std::vector<cis::ClassPair> parse_pairs(const std::vector<std::string>& v) {
  std::vector<cis::ClassPair> out;
  for (const auto& s : v) out.push_back(parse_pair(s));
  return out;
}

void check_pairs(const std::vector<cis::ClassPair>& pairs, int classes) {
  for (const auto& p : pairs)
    if (p.first > classes || p.second > classes)
      throw UsageError("class pair " + cis::to_string(p) + " outside the " + std::to_string(classes) + " classes");
}

// Class numbering of test data must follow the training data.
void check_labels(const cis::LabeledMatrix& train, const cis::LabeledMatrix& test) {
  if (train.label_ids() != test.label_ids()) throw cis::InvalidData("test labels differ from training labels");
  if (train.cols() != test.cols()) throw cis::InvalidData("test data has a different feature count");
}

class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw cis::IoError("cannot create " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& contents) {
    cis::io::write_atomic(dir_ / name, contents);
    files_.push_back(name);
  }

  // Config snapshot, seed and version; enough to rerun the command.
  void manifest(const std::string& command, const Common& common, const json& config) {
    json m;
    m["tool"] = "cis";
    m["version"] = cis::kVersion;
    m["subcommand"] = command;
    m["seed"] = common.seed;
    m["config"] = config;
    m["outputs"] = files_;
    cis::io::write_atomic(dir_ / "manifest.json", m.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

json load_config(const std::string& path, const std::string& command) {
  if (path.empty()) return json::object();
  json j;
  try {
    j = json::parse(cis::io::read_file(path));
  } catch (const json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config " + path + " must hold a JSON object");
  // Top-level keys apply to every subcommand; a section named after the
  // subcommand overrides them.
  json merged = json::object();
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!it.value().is_object()) merged[it.key()] = it.value();
  if (j.contains(command)) merged.update(j.at(command));
  return merged;
}

struct Command {
  CLI::App* app = nullptr;
  std::unique_ptr<Options> options;
  Common common;
  std::function<void(Command&)> run;

  void finish() const { options->resolve(load_config(common.config, app->get_name())); }
};

std::string metrics_row_cells(const cis::ScreenMetrics& m) {
  return std::to_string(m.fp) + "," + std::to_string(m.fn) + "," + cis::io::format_double(m.sensitivity) + "," +
         cis::io::format_double(m.specificity) + "," + std::to_string(m.mms);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariance-insured screening and classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cis::kVersion);
  std::vector<std::unique_ptr<Command>> commands;
  auto make = [&](const std::string& name, const std::string& help) -> Command& {
    auto c = std::make_unique<Command>();
    c->app = app.add_subcommand(name, help);
    c->options = std::make_unique<Options>(c->app);
    c->common.bind(*c->options, c->app);
    commands.push_back(std::move(c));
    return *commands.back();
  };

  // simulate
  struct {
    int example = 1;
    cis::Index p = 10000;
    cis::Index n_per_class = 100;
    cis::Index n_test_per_class = 50;
  } sim;
  {
    Command& c = make("simulate", "draw train/test data from a numerical example");
    c.options->add("example", sim.example, "example design 1, 2 or 3")->check(CLI::Range(1, 3));
    c.options->add("p", sim.p, "feature count");
    c.options->add("n-per-class", sim.n_per_class, "training rows per class");
    c.options->add("n-test-per-class", sim.n_test_per_class, "test rows per class");
    c.run = [&](Command& c) {
      if (sim.example < 1 || sim.example > 3) throw UsageError("--example must be 1, 2 or 3");
      const cis::SimDesign design = cis::example_design(sim.example, sim.p, sim.n_per_class, c.common.seed,
                                                        sim.n_test_per_class);
      const cis::SimSample s = cis::sample(design);
      Output out(c.common.out_dir);
      out.write("train.csv", cis::to_csv(s.train));
      out.write("test.csv", cis::to_csv(s.test));
      out.write("truth.csv", cis::truth_csv(s.truths));
      out.write("design.json", cis::to_json(design).dump(2) + "\n");
      out.manifest("simulate", c.common, c.options->snapshot());
    };
  }

  // screen
  struct {
    std::string train;
    std::string pair = "1-2";
    bool export_graph = false;
  } scr;
  ScreenArgs scr_args;
  {
    Command& c = make("screen", "covariance-insured screening of one class pair");
    c.options->add("train", scr.train, "training CSV");
    c.options->add("pair", scr.pair, "class pair a-b");
    c.options->flag("export-graph", scr.export_graph, "also write edges.csv and components.csv");
    scr_args.bind(*c.options);
    c.run = [&](Command& c) {
      if (scr.train.empty()) throw UsageError("--train is required");
      const cis::ClassPair pair = parse_pair(scr.pair);
      const cis::ScreeningConfig cfg = scr_args.config();
      const cis::LabeledMatrix raw = cis::read_csv(scr.train);
      check_pairs({pair}, raw.classes());
      const cis::PreparedTrain t = cis::prepare(raw, pair, scr_args.rows(), cfg.centering);
      const cis::ScreeningResult r = cis::screen(cis::LazyCorrelationGraph(t.basis, cfg.alpha), t.summary, pair, cfg);
      for (const auto& w : r.warnings) std::cerr << "warning [screening]: " << w << "\n";
      Output out(c.common.out_dir);
      out.write("screening.csv", cis::screening_report_csv(r));
      if (scr.export_graph) {
        const auto g = cis::connected_components(
            cis::build_graph(*t.basis, cfg.alpha, c.common.budget_bytes(), cis::resolve_threads(c.common.threads)));
        out.write("edges.csv", cis::edges_csv(g));
        out.write("components.csv", cis::components_csv(g));
      }
      out.manifest("screen", c.common, c.options->snapshot());
      std::cout << "selected " << r.selected.size() << " of " << raw.cols() << " features\n";
    };
  }

  // classify
  struct {
    std::string train, test, truth, pair, method = "CIS";
  } cls;
  ScreenArgs cls_args;
  {
    Command& c = make("classify", "fit pairwise classifiers and predict test rows");
    c.options->add("train", cls.train, "training CSV");
    c.options->add("test", cls.test, "test CSV");
    c.options->add("truth", cls.truth, "optional truth CSV for screening metrics");
    c.options->add("pair", cls.pair, "class pair a-b; empty = voting over all pairs");
    c.options->add("method", cls.method, "CIS or MS");
    cls_args.bind(*c.options);
    c.run = [&](Command& c) {
      if (cls.train.empty() || cls.test.empty()) throw UsageError("--train and --test are required");
      const cis::Method method = parse_method(cls.method);
      const cis::ScreeningConfig cfg = cls_args.config();
      const cis::LabeledMatrix train = cis::read_csv(cls.train);
      const cis::LabeledMatrix test = cis::read_csv(cls.test);
      check_labels(train, test);
      std::vector<cis::GroundTruth> truths;
      if (!cls.truth.empty()) truths = cis::read_truth_csv(cls.truth);
      const bool single = !cls.pair.empty();
      const std::vector<cis::ClassPair> pairs =
          single ? std::vector<cis::ClassPair>{parse_pair(cls.pair)} : cis::all_pairs(train.classes());
      check_pairs(pairs, train.classes());

      const auto outcomes =
          cis::fit_pairs(train, pairs, method, cfg, cls_args.rows(), cis::resolve_threads(c.common.threads));
      const auto id = [&](int k) { return std::to_string(train.label_ids()[static_cast<std::size_t>(k - 1)]); };

      cis::io::CsvWriter pred(single ? std::vector<std::string>{"row", "label", "predicted", "score"}
                                     : std::vector<std::string>{"row", "label", "predicted", "tied"});
      double overall = 0.0;
      if (single) {
        const auto& o = outcomes.front();
        if (!o.model) throw cis::EmptySelection();
        for (cis::Index i = 0; i < test.rows(); ++i) {
          const int y = test.label(i);
          if (y != o.pair.first && y != o.pair.second) continue;
          const double s = o.model->score(test.values().row(i).transpose());
          pred.row({std::to_string(i + 1), id(y), id(s >= 0.0 ? o.pair.first : o.pair.second),
                    cis::io::format_double(s)});
        }
        overall = cis::misclassification_rate(*o.model, test);
      } else {
        const cis::VotingEnsemble e = cis::ensemble_of(outcomes, train.classes());
        for (cis::Index i = 0; i < test.rows(); ++i) {
          const cis::Vote v = cis::predict_vote(e, test.values().row(i).transpose());
          pred.row({std::to_string(i + 1), id(test.label(i)), id(v.label), v.tied ? "1" : "0"});
        }
        overall = cis::misclassification_rate(e, test);
      }

      cis::io::CsvWriter summary({"pair", "er_percent", "selected", "fp", "fn", "sensitivity", "specificity", "mms"});
      json models = json::array();
      for (const auto& o : outcomes) {
        std::string metrics = ",,,,";
        for (const auto& t : truths)
          if (t.pair == o.pair) metrics = metrics_row_cells(cis::screen_metrics(o.selected, o.ranking, t, train.cols()));
        const double er = o.model ? cis::misclassification_rate(*o.model, test) : cis::kEmptySelectionError;
        summary.row({cis::to_string(o.pair), cis::io::format_double(100.0 * er), std::to_string(o.selected.size()),
                     metrics});
        if (o.model) models.push_back(cis::to_json(*o.model));
      }
      if (!single) summary.row({"all", cis::io::format_double(100.0 * overall), "", ",,,,"});

      Output out(c.common.out_dir);
      out.write("predictions.csv", pred.str());
      out.write("summary.csv", summary.str());
      out.write("model.json", models.dump(2) + "\n");
      out.manifest("classify", c.common, c.options->snapshot());
      std::cout << "ER " << cis::io::format_fixed(100.0 * overall, 2) << "%\n";
    };
  }

  // cv
  struct {
    std::string train, method = "CIS";
    std::vector<std::string> pairs{"1-2"};
    int folds = 5;
    std::vector<double> tau_grid, alpha_grid{0.2};
    int bootstrap = 0;
  } cv;
  ScreenArgs cv_args;
  {
    Command& c = make("cv", "cross-validate tau and alpha");
    c.options->add("train", cv.train, "training CSV");
    c.options->add("pairs", cv.pairs, "class pairs a-b")->delimiter(',');
    c.options->add("method", cv.method, "CIS or MS");
    c.options->add("folds", cv.folds, "fold count");
    c.options->add("tau-grid", cv.tau_grid, "tau values; empty = |mean difference| quantiles")->delimiter(',');
    c.options->add("alpha-grid", cv.alpha_grid, "alpha values")->delimiter(',');
    c.options->add("bootstrap", cv.bootstrap, "stratified bootstrap resamples for selection frequencies");
    cv_args.bind(*c.options);
    c.run = [&](Command& c) {
      if (cv.train.empty()) throw UsageError("--train is required");
      if (cv.bootstrap < 0) throw UsageError("--bootstrap must be nonnegative");
      const cis::Method method = parse_method(cv.method);
      const cis::ScreeningConfig base = cv_args.config();
      const auto pairs = parse_pairs(cv.pairs);
      if (pairs.empty()) throw UsageError("--pairs is empty");
      const cis::LabeledMatrix raw = cis::read_csv(cv.train);
      check_pairs(pairs, raw.classes());
      cis::CvPlan plan;
      plan.folds = cv.folds;
      plan.tau_grid = cv.tau_grid;
      plan.alpha_grid = cv.alpha_grid;
      plan.seed = c.common.seed;
      const unsigned threads = cis::resolve_threads(c.common.threads);
      const auto results = cis::cross_validate(raw, pairs, plan, base, method, cv_args.rows(), threads);
      Output out(c.common.out_dir);
      out.write("cv.csv", cis::cv_table_csv(results));
      if (cv.bootstrap > 0) {
        cis::io::CsvWriter w({"pair", "feature", "frequency"});
        for (const auto& pair : pairs) {
          const auto rep = cis::stability_frequencies(raw, pair, cv.bootstrap, plan, base, method, cv_args.rows(), threads);
          for (cis::Index j = 0; j < rep.frequency.size(); ++j)
            w.row({cis::to_string(pair), std::to_string(j + 1), cis::io::format_double(rep.frequency(j))});
        }
        out.write("stability.csv", w.str());
      }
      out.manifest("cv", c.common, c.options->snapshot());
      for (const auto& r : results)
        std::cout << cis::to_string(r.method) << " " << cis::to_string(r.pair) << ": tau "
                  << cis::io::format_double(r.tau) << ", alpha " << cis::io::format_double(r.alpha) << "\n";
    };
  }

  // bench
  cis::BenchConfig bench_defaults;
  struct {
    int example = 1;
    cis::Index p = 10000, n_per_class = 100, n_test_per_class = 50;
    std::vector<double> alphas{0.2};
    int depth = 10, replicates = 50, folds = 5;
    std::vector<double> tau_grid{0.5, 1.0, 1.5, 2.0};
    std::vector<std::string> pairs{"1-2", "2-3"};
    bool no_ms = false;
    cis::Index max_block = 0;
    std::string graph_rows = "all", indefinite = "shrink_depth", centering = "pooled";
  } bench;
  {
    Command& c = make("bench", "Monte Carlo benchmark of CIS against marginal screening");
    c.options->add("example", bench.example, "example design 1, 2 or 3")->check(CLI::Range(1, 3));
    c.options->add("p", bench.p, "feature count");
    c.options->add("n-per-class", bench.n_per_class, "training rows per class");
    c.options->add("n-test-per-class", bench.n_test_per_class, "test rows per class");
    c.options->add("alpha", bench.alphas, "correlation thresholds")->delimiter(',');
    c.options->add("depth", bench.depth, "subgraph depth m");
    c.options->add("replicates", bench.replicates, "replicate count");
    c.options->add("folds", bench.folds, "cross-validation folds for tau");
    c.options->add("tau-grid", bench.tau_grid, "tau values; empty = quantiles")->delimiter(',');
    c.options->add("pairs", bench.pairs, "class pairs a-b")->delimiter(',');
    c.options->flag("no-ms", bench.no_ms, "skip the marginal screening baseline");
    c.options->add("max-block", bench.max_block, "largest inverted block, 0 = rows/10");
    c.options->add("graph-rows", bench.graph_rows, "rows behind the graph: all or pair");
    c.options->add("indefinite", bench.indefinite, "indefinite blocks: shrink_depth or lu");
    c.options->add("centering", bench.centering, "correlation centering: pooled (within class) or plain");
    c.run = [&](Command& c) {
      if (bench.example < 1 || bench.example > 3) throw UsageError("--example must be 1, 2 or 3");
      ScreenArgs shape;
      shape.graph_rows = bench.graph_rows;
      shape.indefinite = bench.indefinite;
      cis::BenchConfig cfg = bench_defaults;
      cfg.example = bench.example;
      cfg.p = bench.p;
      cfg.n_per_class = bench.n_per_class;
      cfg.n_test_per_class = bench.n_test_per_class;
      cfg.alphas = bench.alphas;
      cfg.depth = bench.depth;
      cfg.replicates = bench.replicates;
      cfg.folds = bench.folds;
      cfg.tau_grid = bench.tau_grid;
      cfg.pairs = parse_pairs(bench.pairs);
      check_pairs(cfg.pairs, 3);
      cfg.include_ms = !bench.no_ms;
      if (bench.max_block > 0) cfg.max_block = bench.max_block;
      cfg.graph_rows = shape.rows();
      cfg.indefinite = shape.indefinite_policy();
      cfg.centering = parse_centering(bench.centering);
      cfg.seed = c.common.seed;
      cfg.threads = c.common.threads;
      try {
        cfg.validate();
      } catch (const cis::Error& e) {
        throw UsageError(e.what());
      }
      const cis::BenchReport rep = cis::run_benchmark(cfg);
      Output out(c.common.out_dir);
      out.write("report.csv", cis::bench_report_csv(rep));
      out.write("replicates.csv", cis::bench_replicates_csv(rep));
      const std::string table = cis::bench_table(rep);
      out.write("table.txt", table);
      out.manifest("bench", c.common, c.options->snapshot());
      std::cout << table;
    };
  }

  // boundary
  struct {
    std::vector<std::string> kinds{"CaiSun", "Detection", "CisUpper"};
    double sigma = 1.0;
    std::vector<double> pis{0.2, 0.5, 0.8};
    int grid_size = 99;
  } bnd;
  {
    Command& c = make("boundary", "sample discovery and detection boundary curves");
    c.options->add("kind", bnd.kinds, "CaiSun, Detection, CisUpper")->delimiter(',');
    c.options->add("sigma", bnd.sigma, "marginal standard deviation");
    c.options->add("pi", bnd.pis, "ratios for CisUpper curves")->delimiter(',');
    c.options->add("grid-size", bnd.grid_size, "interior beta grid points");
    c.run = [&](Command& c) {
      std::vector<cis::BoundaryKind> kinds;
      for (const auto& k : bnd.kinds) {
        try {
          kinds.push_back(cis::boundary_kind_from_string(k));
        } catch (const cis::Error& e) {
          throw UsageError(e.what());
        }
      }
      const auto curves = cis::sample_curves(kinds, bnd.sigma, bnd.pis, bnd.grid_size);
      Output out(c.common.out_dir);
      out.write("boundary.csv", cis::boundary_csv(curves));
      out.manifest("boundary", c.common, c.options->snapshot());
    };
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error [usage]: " << e.what() << "\n";
    return 2;
  }

  for (auto& c : commands) {
    if (!c->app->parsed()) continue;
    try {
      c->finish();
      c->run(*c);
    } catch (const UsageError& e) {
      std::cerr << "error [usage]: " << e.what() << "\n";
      return 2;
    } catch (const cis::Error& e) {
      std::cerr << "error [" << e.stage() << "]: " << e.what() << "\n";
      return 1;
    } catch (const json::exception& e) {
      std::cerr << "error [io]: " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "error [" << c->app->get_name() << "]: " << e.what() << "\n";
      return 1;
    }
  }
  return 0;
}
