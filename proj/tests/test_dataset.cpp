#include <filesystem>
#include <vector>

#include "catch_amalgamated.hpp"
#include "cis/dataset.hpp"
#include "cis/simgen.hpp"

using namespace cis;
using Catch::Approx;

namespace {

LabeledMatrix two_class(const Eigen::MatrixXd& x, std::vector<int> labels) {
  return LabeledMatrix::from_raw(x, labels, {}, 1);
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cis_test_dataset_" + name);
}

}  // namespace

TEST_CASE("labels are remapped densely in ascending order") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 2, 3, 4, 5, 6, 7, 9;
  auto d = LabeledMatrix::from_raw(x, std::vector<int>{9, 5, 9, 5});
  CHECK(d.classes() == 2);
  CHECK(d.labels() == std::vector<int>{2, 1, 2, 1});
  CHECK(d.label_ids() == std::vector<int>{5, 9});
  CHECK(d.feature_names() == std::vector<std::string>{"x1", "x2"});
}

TEST_CASE("from_raw rejects malformed input") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 2, 3, 4, 5, 6;
  CHECK_THROWS_AS(LabeledMatrix::from_raw(x, std::vector<int>{1, 2}), InvalidData);
  CHECK_THROWS_AS(LabeledMatrix::from_raw(x, std::vector<int>{1, 1, 1}), InvalidData);
  CHECK_THROWS_AS(LabeledMatrix::from_raw(x, std::vector<int>{1, 1, 2}), InvalidData);
  x(0, 0) = std::nan("");
  CHECK_THROWS_AS(LabeledMatrix::from_raw(x, std::vector<int>{1, 2, 2}, {}, 1), InvalidData);
}

TEST_CASE("standardize_columns on a symmetric three point column") {
  Eigen::MatrixXd x(3, 1);
  x << 1, 2, 3;
  auto z = standardize_columns(two_class(x, {1, 2, 2}));
  CHECK(z.values()(0, 0) == Approx(-1.0).margin(1e-15));
  CHECK(z.values()(1, 0) == Approx(0.0).margin(1e-15));
  CHECK(z.values()(2, 0) == Approx(1.0).margin(1e-15));
}

TEST_CASE("standardize_columns is idempotent") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(40, 5);
  std::vector<int> y(40);
  for (int i = 0; i < 40; ++i) y[static_cast<std::size_t>(i)] = 1 + i % 2;
  auto once = standardize_columns(two_class(x, y));
  auto twice = standardize_columns(once);
  CHECK((once.values() - twice.values()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("standardized example draw has exact column moments") {
  const SimSample s = sample(example_design(1, 10000, 50, 11, 0));
  REQUIRE(s.train.rows() == 150);
  const auto z = standardize_columns(s.train);
  const auto& v = z.values();
  double worst_mean = 0.0, worst_sd = 0.0;
  for (Index j = 0; j < v.cols(); ++j) {
    // Recomputed with a two-pass sum independent of the transform.
    double m = 0.0;
    for (Index i = 0; i < v.rows(); ++i) m += v(i, j);
    m /= 150.0;
    double ss = 0.0;
    for (Index i = 0; i < v.rows(); ++i) ss += (v(i, j) - m) * (v(i, j) - m);
    worst_mean = std::max(worst_mean, std::abs(m));
    worst_sd = std::max(worst_sd, std::abs(std::sqrt(ss / 149.0) - 1.0));
  }
  CHECK(worst_mean < 1e-10);
  CHECK(worst_sd < 1e-10);
}

TEST_CASE("zero variance column is reported by index") {
  Eigen::MatrixXd x(4, 3);
  x << 1, 7, 0, 2, 7, 1, 3, 7, 0, 4, 7, 1;
  try {
    column_scaling(two_class(x, {1, 1, 2, 2}));
    FAIL("expected ZeroVarianceColumn");
  } catch (const ZeroVarianceColumn& e) {
    CHECK(e.column() == 1);
    CHECK(e.stage() == "dataset");
  }
}

TEST_CASE("class_summaries with one sample per class") {
  Eigen::MatrixXd x(2, 2);
  x << 0, 2, 4, 6;
  auto s = class_summaries(two_class(x, {1, 2}));
  CHECK(s.class_means(0, 0) == 0.0);
  CHECK(s.class_means(0, 1) == 2.0);
  CHECK(s.class_means(1, 0) == 4.0);
  CHECK(s.class_means(1, 1) == 6.0);
  CHECK(s.mean_difference({1, 2})(1) == -4.0);
}

TEST_CASE("balanced plus minus one class has zero mean and pooled sd uses n - K") {
  Eigen::MatrixXd x(6, 1);
  x << 1, -1, 1, -1, 5, 7;
  auto s = class_summaries(two_class(x, {1, 1, 1, 1, 2, 2}));
  CHECK(s.class_means(0, 0) == 0.0);
  CHECK(s.class_means(1, 0) == 6.0);
  // within sum of squares 4 + 2 over 6 - 2 rows
  CHECK(s.pooled_sd(0) == Approx(std::sqrt(6.0 / 4.0)));
}

TEST_CASE("empty class throws unless allowed") {
  Eigen::MatrixXd x(4, 1);
  x << 1, 2, 3, 4;
  auto d = LabeledMatrix::from_raw(x, std::vector<int>{1, 1, 2, 3}, {}, 1);
  auto sub = d.subset(std::vector<Index>{0, 1, 3});
  CHECK(sub.classes() == 3);
  CHECK(sub.class_counts() == std::vector<Index>{2, 0, 1});
  CHECK_THROWS_AS(class_summaries(sub), EmptyClass);
  auto s = class_summaries(sub, true);
  CHECK(s.class_means(1, 0) == 0.0);
  CHECK(s.class_means(2, 0) == 4.0);
}

TEST_CASE("example class mean of feature 6 is near its design value") {
  const SimSample s = sample(example_design(1, 200, 100, 3, 0));
  const auto summary = class_summaries(s.train);
  CHECK(std::abs(summary.class_means(0, 5) - 1.5) < 3.0 / std::sqrt(100.0));
}

TEST_CASE("CSV round trip preserves values bit for bit") {
  Eigen::MatrixXd x(4, 2);
  x << 0.1, -2.5e-17, 1.0 / 3.0, 4, 1e300, -0.0, 5e-324, 2.0 / 7.0;
  auto d = LabeledMatrix::from_raw(x, std::vector<int>{3, 7, 3, 7}, {"a", "b"});
  const auto path = temp_path("roundtrip.csv");
  write_csv(path, d);
  auto back = read_csv(path);
  CHECK(back.values() == d.values());
  CHECK(back.label_ids() == std::vector<int>{3, 7});
  CHECK(back.labels() == d.labels());
  CHECK(back.feature_names() == d.feature_names());
  CHECK(to_csv(back) == to_csv(d));
  std::filesystem::remove(path);
}

TEST_CASE("read_csv reports malformed files") {
  const auto path = temp_path("bad.csv");
  io::write_atomic(path, "y,x1\n1,2\n");
  CHECK_THROWS_AS(read_csv(path), IoError);
  io::write_atomic(path, "label,x1\n1,2\n2\n");
  CHECK_THROWS_AS(read_csv(path), IoError);
  io::write_atomic(path, "label,x1\n1,2\n2,abc\n");
  CHECK_THROWS_AS(read_csv(path), IoError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_csv(path), IoError);
}

TEST_CASE("scaling from training rows applies unchanged to other rows") {
  Eigen::MatrixXd x(4, 1);
  x << 1, 3, 5, 7;
  auto d = two_class(x, {1, 1, 2, 2});
  auto s = column_scaling(d);
  auto sub = apply_scaling(d.subset(std::vector<Index>{3}), s);
  CHECK(sub.values()(0, 0) == Approx((7.0 - 4.0) / s.scale(0)));
}
