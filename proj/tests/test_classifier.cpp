#include "catch_amalgamated.hpp"
#include "cis/classifier.hpp"
#include "cis/pipeline.hpp"
#include "cis/simgen.hpp"
#include "cis/stats.hpp"

using namespace cis;
using Catch::Approx;

namespace {

// Model on raw coordinates (identity scaling) with the given parameters.
FittedClassifier manual(ClassPair pair, FeatureSet sel, Eigen::VectorXd mu_a, Eigen::VectorXd mu_b,
                        Eigen::MatrixXd precision, Index p) {
  FittedClassifier m;
  m.pair = pair;
  m.selected = std::move(sel);
  m.mu_a = std::move(mu_a);
  m.mu_b = std::move(mu_b);
  m.midpoint = 0.5 * (m.mu_a + m.mu_b);
  m.precision = std::move(precision);
  m.direction = m.precision * (m.mu_a - m.mu_b);
  m.scaling = ColumnScaling::identity(p);
  return m;
}

FittedClassifier one_dim(ClassPair pair, Index p = 1) {
  return manual(pair, {0}, Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, -1.0),
                Eigen::MatrixXd::Identity(1, 1), p);
}

Eigen::VectorXd point(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

LabeledMatrix rows(const Eigen::MatrixXd& x, std::vector<int> y) { return LabeledMatrix::from_raw(x, y, {}, 1); }

}  // namespace

TEST_CASE("one dimensional symmetric rule splits at zero") {
  const auto m = one_dim({1, 2});
  CHECK(m.predict(point({0.3})) == 1);
  CHECK(m.predict(point({-0.3})) == 2);
  CHECK(m.score(point({0.0})) == 0.0);
  CHECK(m.predict(point({0.0})) == 1);
  CHECK(m.predict(point({1.0})) == 1);
  CHECK(m.predict(point({-1.0})) == 2);
}

TEST_CASE("identity precision reduces to nearest centroid") {
  const auto m = manual({1, 2}, {0, 2}, point({1.0, 0.0}), point({0.0, 2.0}), Eigen::MatrixXd::Identity(2, 2), 3);
  Rng r(4);
  for (int t = 0; t < 200; ++t) {
    const Eigen::VectorXd x = point({3 * r.normal(), 5 * r.normal(), 3 * r.normal()});
    const double da = std::pow(x(0) - 1.0, 2) + std::pow(x(2) - 0.0, 2);
    const double db = std::pow(x(0) - 0.0, 2) + std::pow(x(2) - 2.0, 2);
    if (std::abs(da - db) > 1e-9) CHECK(m.predict(x) == (da < db ? 1 : 2));
  }
}

TEST_CASE("fit_pair on a hand computed block") {
  // Two features, within-class data symmetric about the class means.
  Eigen::MatrixXd x(8, 2);
  x << 2, 1, 0, 1, 1, 2, 1, 0, -1, -1, -1, -3, 0, -2, -2, -2;
  const auto t = prepare(rows(x, {1, 1, 1, 1, 2, 2, 2, 2}));
  ScreeningResult r;
  r.pair = {1, 2};
  r.selected = {0, 1};
  PrecisionBlock b;
  b.members = {0, 1};
  b.precision = Eigen::Matrix2d::Identity();
  r.blocks.push_back(b);
  const auto m = fit_pair(t.standardized, t.scaling, {1, 2}, r);
  CHECK(m.selected == FeatureSet{0, 1});
  CHECK((m.mu_a - t.summary.class_means.row(0).transpose()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((m.direction - (m.mu_a - m.mu_b)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(m.predict(x.row(0).transpose()) == 1);
  CHECK(m.predict(x.row(7).transpose()) == 2);
  CHECK(misclassification_rate(m, t.standardized.with_values(x)) == 0.0);
}

TEST_CASE("restricted precision keeps only selected members and zero across blocks") {
  ScreeningResult r;
  PrecisionBlock a, b;
  a.members = {0, 1};
  a.precision = (Eigen::Matrix2d() << 2, -1, -1, 2).finished();
  b.members = {3};
  b.precision = Eigen::MatrixXd::Constant(1, 1, 5.0);
  r.blocks = {a, b};
  const std::vector<Index> sel{1, 3};
  const Eigen::MatrixXd o = restricted_precision(r, sel);
  CHECK(o(0, 0) == 2.0);
  CHECK(o(1, 1) == 5.0);
  CHECK(o(0, 1) == 0.0);
}

TEST_CASE("empty selection and missing class are errors") {
  Eigen::MatrixXd x(4, 1);
  x << 1, 2, 3, 4;
  const auto t = prepare(rows(x, {1, 1, 2, 3}));
  CHECK_THROWS_AS(fit_independence(t.standardized, t.scaling, {1, 2}, {}), EmptySelection);
  const auto sub = t.standardized.subset(std::vector<Index>{0, 1, 2});
  CHECK_THROWS_AS(fit_independence(sub, t.scaling, {1, 3}, {0}), MissingClass);
}

TEST_CASE("two class ensemble equals the pair rule") {
  VotingEnsemble e;
  e.classes = 2;
  e.members = {one_dim({1, 2})};
  e.validate();
  for (double v : {-2.0, -0.1, 0.0, 0.1, 2.0}) CHECK(predict_vote(e, point({v})).label == one_dim({1, 2}).predict(point({v})));
}

TEST_CASE("three class votes") {
  // Member (a, b) votes a for x >= 0 when built from one_dim.
  auto flip = [](ClassPair p) {
    auto m = one_dim(p);
    m.direction *= -1.0;
    return m;
  };
  VotingEnsemble e;
  e.classes = 3;
  e.members = {one_dim({1, 2}), one_dim({1, 3}), one_dim({2, 3})};
  auto v = predict_vote(e, point({1.0}));
  CHECK(v.label == 1);
  CHECK(!v.tied);
  e.members = {one_dim({1, 2}), flip({1, 3}), one_dim({2, 3})};  // 1 > 2, 3 > 1, 2 > 3
  v = predict_vote(e, point({1.0}));
  CHECK(v.label == 1);
  CHECK(v.tied);
  e.members.pop_back();
  CHECK_THROWS_AS(e.validate(), InvalidData);
}

TEST_CASE("misclassification rates") {
  Eigen::MatrixXd x(4, 1);
  x << 1, 2, -1, -2;
  const auto test = rows(x, {1, 1, 2, 2});
  CHECK(misclassification_rate(one_dim({1, 2}), test) == 0.0);
  auto constant = one_dim({1, 2});
  constant.direction.setZero();
  CHECK(misclassification_rate(constant, test) == 0.5);
  const auto other = rows(x, {1, 1, 3, 3});
  CHECK_THROWS_AS(misclassification_rate(one_dim({2, 3}), other.subset(std::vector<Index>{0, 1})), InvalidData);
}

TEST_CASE("rule scores raw data through the stored scaling") {
  auto m = one_dim({1, 2});
  m.scaling.center(0) = 10.0;
  m.scaling.scale(0) = 2.0;
  CHECK(m.score(point({12.0})) == Approx(2.0));  // z = 1, direction = 2
  CHECK(m.predict(point({9.0})) == 2);
}

TEST_CASE("oracle rule error is close to the Bayes rate") {
  const auto design = example_design(1, 20, 2, 5, 2000);
  const auto model = fit_oracle(design, {1, 2});
  CHECK(model.selected.size() == 20);
  const auto s = sample(design);
  const double rate = misclassification_rate(model, s.test);
  const double bayes = stats::normal_cdf(-oracle_delta_p(design, {1, 2}) / 2.0);
  CHECK(std::abs(rate - bayes) < 0.02);
  const double margin = model.score(design.class_mean(1));
  CHECK(margin == Approx(0.5 * std::pow(oracle_delta_p(design, {1, 2}), 2)).epsilon(1e-12));
}

TEST_CASE("model JSON round trip") {
  const auto t = prepare(sample(example_design(1, 30, 20, 3, 0)).train);
  const auto m = fit_independence(t.standardized, t.scaling, {1, 2}, {4, 9, 17});
  const auto back = classifier_from_json(to_json(m));
  CHECK(back.selected == m.selected);
  CHECK(to_json(m)["selected"] == nlohmann::json({5, 10, 18}));
  const Eigen::VectorXd x = t.standardized.values().row(3).transpose();
  CHECK(back.score(x) == m.score(x));
}
