#include <algorithm>

#include "catch_amalgamated.hpp"
#include "cis/boundary.hpp"

using namespace cis;
using Catch::Approx;

namespace {

constexpr double kStep = 1e-13;

double jump(double (*f)(double, double), double at, double sigma) {
  return std::abs(f(at + kStep, sigma) - f(at - kStep, sigma));
}

double detection_at(double beta, double) { return detection_boundary(beta); }

}  // namespace

TEST_CASE("discovery boundary values") {
  CHECK(cai_sun_boundary(0.75, 1.0) == 0.25);
  CHECK(cai_sun_boundary(0.5, 2.0) == 0.0);
  CHECK(cai_sun_boundary(0.5, 0.5) == 0.375);
  CHECK(cai_sun_boundary(0.9, 0.5) == Approx(std::pow(1.0 - 0.5 * std::sqrt(0.1), 2)).epsilon(1e-15));
}

TEST_CASE("detection boundary values") {
  CHECK(detection_boundary(0.5) == 0.0);
  CHECK(detection_boundary(0.3) == 0.0);
  CHECK(detection_boundary(0.6) == Approx(0.1).epsilon(1e-15));
  CHECK(detection_boundary(0.75) == 0.25);
  CHECK(std::abs(detection_boundary(0.75 + 1e-13) - 0.25) < 1e-12);
}

TEST_CASE("CIS upper bound values") {
  // high-precision reference value
  CHECK(cis_upper_boundary(0.75, 1.0, 0.5) == Approx(0.0438611699158103).epsilon(1e-13));
  for (double b : {0.1, 0.5, 0.75, 0.9})
    for (double s : {0.5, 1.0, 2.0})
      CHECK(std::abs(cis_upper_boundary(b, s, 1.0 - 1e-12) - cai_sun_boundary(b, s)) < 1e-9);
}

TEST_CASE("branch continuity") {
  CHECK(jump(cai_sun_boundary, 0.75, 0.5) < 1e-12);
  CHECK(jump(cai_sun_boundary, 0.75, 2.0) < 1e-12);
  CHECK(jump(cai_sun_boundary, 1.0 - 0.8 * 0.8, 0.8) < 1e-12);
  CHECK(jump(cai_sun_boundary, 1.0 - 1.0 / (1.5 * 1.5), 1.5) < 1e-12);
  CHECK(jump(detection_at, 0.5, 1.0) < 1e-12);
  CHECK(jump(detection_at, 0.75, 1.0) < 1e-12);
}

TEST_CASE("CIS upper bound lies below the discovery boundary at unit variance") {
  for (double pi : {0.2, 0.5, 0.8})
    for (double b : beta_grid(99)) CHECK(cis_upper_boundary(b, 1.0, pi) < cai_sun_boundary(b, 1.0));
}

TEST_CASE("dominance chain above three quarters") {
  for (double b : beta_grid(99)) {
    if (b <= 0.75) continue;
    CHECK(cis_upper_boundary(b, 1.0, 0.5) < detection_boundary(b));
    CHECK(detection_boundary(b) == Approx(cai_sun_boundary(b, 1.0)).epsilon(1e-15));
  }
}

TEST_CASE("CIS upper curves increase with pi") {
  const auto curves = sample_curves({BoundaryKind::CisUpper}, 1.0, {0.2, 0.5, 0.8}, 99);
  REQUIRE(curves.size() == 3);
  for (std::size_t i = 0; i < 99; ++i) {
    CHECK(curves[0].samples[i].r < curves[1].samples[i].r);
    CHECK(curves[1].samples[i].r < curves[2].samples[i].r);
  }
}

TEST_CASE("curves are nonnegative and bounded by one") {
  for (double s : {0.5, 1.0, 2.0}) {
    const auto curves = sample_curves({BoundaryKind::CaiSun, BoundaryKind::Detection, BoundaryKind::CisUpper}, s,
                                      {0.2, 0.5, 0.8}, 99);
    for (const auto& c : curves)
      for (const auto& pt : c.samples) {
        CHECK(pt.r >= 0.0);
        CHECK(pt.r <= 1.0);
      }
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(cai_sun_boundary(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(cai_sun_boundary(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(cai_sun_boundary(0.5, 0.0), DomainError);
  CHECK_THROWS_AS(detection_boundary(-0.1), DomainError);
  CHECK_THROWS_AS(cis_upper_boundary(0.5, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(cis_upper_boundary(0.5, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(beta_grid(1), DomainError);
  CHECK_THROWS_AS(sample_curves({BoundaryKind::CisUpper}, 1.0, {}, 9), DomainError);
  CHECK_THROWS_AS(boundary_kind_from_string("Other"), DomainError);
}

TEST_CASE("three point grid") {
  const auto g = beta_grid(3);
  CHECK(g == std::vector<double>{0.25, 0.5, 0.75});
  const auto c = sample_curve(BoundaryKind::Detection, 1.0, 0.0, 3);
  CHECK(c.samples[2].r == 0.25);
}

TEST_CASE("boundary CSV leaves pi blank except for CisUpper") {
  const auto curves = sample_curves({BoundaryKind::Detection, BoundaryKind::CisUpper}, 1.0, {0.5}, 3);
  const auto csv = boundary_csv(curves);
  CHECK(csv.rfind("kind,sigma,pi,beta,r\nDetection,1,,0.25,0\n", 0) == 0);
  CHECK(csv.find("\nCisUpper,1,0.5,0.75,") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}
