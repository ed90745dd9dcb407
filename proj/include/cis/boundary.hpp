#ifndef CIS_BOUNDARY_HPP
#define CIS_BOUNDARY_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cis/error.hpp"
#include "cis/io.hpp"

namespace cis {

enum class BoundaryKind { CaiSun, Detection, CisUpper };

inline std::string to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::CaiSun: return "CaiSun";
    case BoundaryKind::Detection: return "Detection";
    case BoundaryKind::CisUpper: return "CisUpper";
  }
  return "";
}

inline BoundaryKind boundary_kind_from_string(const std::string& s) {
  if (s == "CaiSun") return BoundaryKind::CaiSun;
  if (s == "Detection") return BoundaryKind::Detection;
  if (s == "CisUpper") return BoundaryKind::CisUpper;
  throw DomainError("unknown boundary kind '" + s + "'");
}

namespace detail {

inline void check_open_unit(double x, const char* name) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError(std::string(name) + " must lie in (0, 1)");
}

// Discovery-boundary branch structure evaluated at `x` (the signal exponent) with cut
// points placed on `beta`.
inline double discovery_branches(double beta, double x, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  if (sigma == 1.0) return std::pow(1.0 - std::sqrt(1.0 - x), 2);
  if (sigma < 1.0) {
    if (beta > 1.0 - sigma * sigma) return std::pow(1.0 - sigma * std::sqrt(1.0 - x), 2);
    return (1.0 - sigma * sigma) * x;
  }
  if (beta > 1.0 - 1.0 / (sigma * sigma)) return std::pow(1.0 - sigma * std::sqrt(1.0 - x), 2);
  return 0.0;
}

}  // namespace detail

inline double cai_sun_boundary(double beta, double sigma) {
  detail::check_open_unit(beta, "beta");
  return detail::discovery_branches(beta, beta, sigma);
}

inline double detection_boundary(double beta) {
  detail::check_open_unit(beta, "beta");
  if (beta <= 0.5) return 0.0;
  if (beta <= 0.75) return beta - 0.5;
  return std::pow(1.0 - std::sqrt(1.0 - beta), 2);
}

// Upper bound on the CIS discovery boundary: pi * beta replaces beta inside
// each branch; the branch cut points stay at 1 - sigma^2 and 1 - 1/sigma^2 in
// beta, so for sigma != 1 the bound jumps there.
inline double cis_upper_boundary(double beta, double sigma, double pi) {
  detail::check_open_unit(beta, "beta");
  if (!(pi > 0.0 && pi < 1.0)) throw DomainError("pi must lie in (0, 1)");
  return detail::discovery_branches(beta, pi * beta, sigma);
}

struct BoundaryPoint {
  double beta = 0.0;
  double r = 0.0;
};

struct BoundaryCurve {
  BoundaryKind kind = BoundaryKind::CaiSun;
  double sigma = 1.0;
  double pi = std::numeric_limits<double>::quiet_NaN();  // CisUpper only
  std::vector<BoundaryPoint> samples;
};

// beta_i = i / (grid_size + 1), i = 1..grid_size.
inline std::vector<double> beta_grid(int grid_size) {
  if (grid_size < 2) throw DomainError("grid_size must be at least 2");
  std::vector<double> g;
  for (int i = 1; i <= grid_size; ++i) g.push_back(static_cast<double>(i) / static_cast<double>(grid_size + 1));
  return g;
}

inline BoundaryCurve sample_curve(BoundaryKind kind, double sigma, double pi, int grid_size) {
  BoundaryCurve c;
  c.kind = kind;
  c.sigma = sigma;
  if (kind == BoundaryKind::CisUpper) c.pi = pi;
  for (double b : beta_grid(grid_size)) {
    double r = 0.0;
    switch (kind) {
      case BoundaryKind::CaiSun: r = cai_sun_boundary(b, sigma); break;
      case BoundaryKind::Detection: r = detection_boundary(b); break;
      case BoundaryKind::CisUpper: r = cis_upper_boundary(b, sigma, pi); break;
    }
    c.samples.push_back({b, r});
  }
  return c;
}

// One curve per kind; CisUpper contributes one curve per pi.
inline std::vector<BoundaryCurve> sample_curves(const std::vector<BoundaryKind>& kinds, double sigma,
                                                const std::vector<double>& pis, int grid_size) {
  std::vector<BoundaryCurve> out;
  for (BoundaryKind k : kinds) {
    if (k == BoundaryKind::CisUpper) {
      if (pis.empty()) throw DomainError("CisUpper needs at least one pi");
      for (double pi : pis) out.push_back(sample_curve(k, sigma, pi, grid_size));
    } else {
      out.push_back(sample_curve(k, sigma, 0.0, grid_size));
    }
  }
  return out;
}

inline std::string boundary_csv(const std::vector<BoundaryCurve>& curves) {
  io::CsvWriter w({"kind", "sigma", "pi", "beta", "r"});
  for (const auto& c : curves)
    for (const auto& s : c.samples)
      w.row({to_string(c.kind), io::format_double(c.sigma), std::isnan(c.pi) ? std::string() : io::format_double(c.pi),
             io::format_double(s.beta), io::format_double(s.r)});
  return w.str();
}

}  // namespace cis

#endif  // CIS_BOUNDARY_HPP
