#include <set>

#include "catch_amalgamated.hpp"
#include "cis/simgen.hpp"
#include "cis/tuning.hpp"

using namespace cis;
using Catch::Approx;

namespace {

LabeledMatrix example_train(Index p, Index n, std::uint64_t seed) {
  return sample(example_design(1, p, n, seed, 0)).train;
}

ScreeningConfig base_config() {
  ScreeningConfig c;
  c.depth = 10;
  return c;
}

}  // namespace

TEST_CASE("stratified folds are balanced per class and reproducible") {
  const auto d = example_train(20, 23, 1);
  const auto f = stratified_folds(d, 5, 9);
  CHECK(f == stratified_folds(d, 5, 9));
  CHECK(f != stratified_folds(d, 5, 10));
  for (int k = 1; k <= 3; ++k) {
    std::vector<int> count(5, 0);
    for (Index r : d.rows_of_class(k)) ++count[static_cast<std::size_t>(f[static_cast<std::size_t>(r)])];
    CHECK(*std::max_element(count.begin(), count.end()) - *std::min_element(count.begin(), count.end()) <= 1);
  }
  std::vector<int> total(5, 0);
  for (int v : f) ++total[static_cast<std::size_t>(v)];
  CHECK(*std::max_element(total.begin(), total.end()) - *std::min_element(total.begin(), total.end()) <= 1);
}

TEST_CASE("too few rows per class for the folds") {
  const auto d = example_train(20, 4, 1);
  CHECK_THROWS_AS(stratified_folds(d, 5, 1), FoldTooSmall);
  CHECK_THROWS_AS(stratified_folds(d, 1, 1), InvalidData);
}

TEST_CASE("default tau grid uses quantiles of the absolute difference") {
  Eigen::VectorXd d(5);
  d << -4, 1, 2, -3, 0;
  const auto g = default_tau_grid(d);
  // type 7 quantiles of {0,1,2,3,4}
  CHECK(g[0] == Approx(3.2));
  CHECK(g[1] == Approx(3.6));
  CHECK(g[2] == Approx(3.8));
  CHECK(g[3] == Approx(3.96));
}

TEST_CASE("best row prefers lower error then smaller tau then larger alpha") {
  std::vector<CvRow> t(4);
  t[0] = {1.0, 0.2, 0.10, {}, 0, 0};
  t[1] = {0.5, 0.2, 0.10, {}, 0, 0};
  t[2] = {0.5, 0.4, 0.10, {}, 0, 0};
  t[3] = {2.0, 0.2, 0.20, {}, 0, 0};
  CHECK(detail::best_row(t) == 2);
  t[3].mean_error = 0.05;
  CHECK(detail::best_row(t) == 3);
}

TEST_CASE("singleton grid returns that point") {
  const auto d = example_train(60, 20, 2);
  CvPlan plan;
  plan.tau_grid = {1.0};
  plan.alpha_grid = {0.3};
  const auto r = cross_validate(d, ClassPair{1, 2}, plan, base_config());
  CHECK(r.tau == 1.0);
  CHECK(r.alpha == 0.3);
  REQUIRE(r.table.size() == 1);
  CHECK(r.table[0].fold_error.size() == 5);
}

TEST_CASE("empty selection is penalized and never beats a feasible point") {
  const auto d = example_train(60, 20, 3);
  CvPlan plan;
  plan.tau_grid = {1e6, 1.0};
  const auto r = cross_validate(d, ClassPair{1, 2}, plan, base_config());
  REQUIRE(r.table.size() == 2);
  CHECK(r.table[0].mean_error == kEmptySelectionError);
  CHECK(r.table[0].empty_folds == 5);
  CHECK(r.tau == 1.0);
}

TEST_CASE("table covers the grid and both methods run") {
  const auto d = example_train(80, 20, 4);
  CvPlan plan;
  plan.tau_grid = {0.5, 1.0, 1.5};
  plan.alpha_grid = {0.2, 0.5};
  const std::vector<ClassPair> pairs{{1, 2}, {2, 3}};
  const auto r = cross_validate(d, pairs, plan, base_config(), Method::CIS);
  REQUIRE(r.size() == 2);
  CHECK(r[0].table.size() == 6);
  const auto ms = cross_validate(d, pairs, plan, base_config(), Method::MS);
  CHECK(ms[0].table.size() == 3);
  const auto csv = cv_table_csv(r);
  CHECK(csv.rfind("method,pair,alpha,tau,mean_error,empty_folds,mean_selected,chosen\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
}

TEST_CASE("thread count does not change results") {
  const auto d = example_train(80, 20, 5);
  CvPlan plan;
  plan.tau_grid = {0.5, 1.0};
  plan.alpha_grid = {0.2, 0.4};
  const std::vector<ClassPair> pairs{{1, 2}};
  const auto a = cross_validate(d, pairs, plan, base_config(), Method::CIS, GraphRows::AllClasses, 1);
  const auto b = cross_validate(d, pairs, plan, base_config(), Method::CIS, GraphRows::AllClasses, 4);
  CHECK(cv_table_csv(a) == cv_table_csv(b));
}

TEST_CASE("held out rows do not influence the fold fit") {
  // Fold 0 is refit from the other folds and scored on its own rows, which
  // are then scrambled; the fold-0 rule must not change.
  const auto d = example_train(40, 20, 6);
  CvPlan plan;
  plan.tau_grid = {1.0};
  const auto f = stratified_folds(d, plan.folds, plan.seed);
  Eigen::MatrixXd x = d.values();
  for (Index i = 0; i < x.rows(); ++i)
    if (f[static_cast<std::size_t>(i)] == 0) x.row(i) *= -3.0;
  const auto moved = d.with_values(x);
  const auto r = cross_validate(moved, ClassPair{1, 2}, plan, base_config());

  std::vector<Index> fit, held;
  for (Index i = 0; i < d.rows(); ++i) (f[static_cast<std::size_t>(i)] == 0 ? held : fit).push_back(i);
  ScreeningConfig cfg = base_config();
  cfg.tau = 1.0;
  const auto clean = fit_method(d.subset(fit), {1, 2}, Method::CIS, cfg);
  const auto scrambled = fit_method(moved.subset(fit), {1, 2}, Method::CIS, cfg);
  CHECK(clean.selected == scrambled.selected);
  CHECK(r.table[0].fold_error[0] == misclassification_rate(*clean.model, moved.subset(held)));
}

TEST_CASE("stratified bootstrap keeps class counts") {
  const auto d = example_train(20, 7, 1);
  Rng r(3);
  const auto rows = stratified_bootstrap(d, r);
  const auto b = d.subset(rows);
  CHECK(b.class_counts() == d.class_counts());
}

TEST_CASE("single bootstrap frequencies are that run's selection") {
  const auto d = example_train(60, 20, 7);
  CvPlan plan;
  plan.tau_grid = {1.0, 1.5};
  plan.seed = 12;
  const auto rep = stability_frequencies(d, {1, 2}, 1, plan, base_config());
  Rng rng(derive_seed(plan.seed, 0));
  const auto resample = d.subset(stratified_bootstrap(d, rng));
  const auto cv = cross_validate(resample, ClassPair{1, 2}, plan, base_config());
  ScreeningConfig cfg = base_config();
  cfg.tau = cv.tau;
  cfg.alpha = cv.alpha;
  const auto sel = fit_method(resample, {1, 2}, Method::CIS, cfg).selected;
  const std::set<Index> chosen(sel.begin(), sel.end());
  for (Index j = 0; j < 60; ++j) CHECK(rep.frequency(j) == (chosen.count(j) ? 1.0 : 0.0));
  CHECK(stability_csv(rep).rfind("feature,frequency\n1,", 0) == 0);
}

TEST_CASE("pure noise gives low selection frequencies") {
  SimDesign d;
  d.p = 200;
  d.n_per_class = 50;
  d.n_test_per_class = 0;
  d.mean_table = Eigen::MatrixXd::Zero(2, 1);
  d.seed = 8;
  const auto train = sample(d).train;
  CvPlan plan;
  plan.tau_grid = {0.5, 1.0, 1.5, 2.0};
  const auto rep = stability_frequencies(train, {1, 2}, 20, plan, base_config());
  CHECK(rep.frequency.mean() < 0.2);
}

TEST_CASE("strong features are selected in nearly every resample") {
  const auto d = example_train(1000, 100, 9);
  CvPlan plan;
  plan.tau_grid = {0.5, 1.0, 1.5, 2.0};
  const auto rep = stability_frequencies(d, {1, 2}, 100, plan, base_config());
  for (Index j : {5, 6, 7, 8, 9, 15, 16, 17, 18, 19}) CHECK(rep.frequency(j) >= 0.9);
}
