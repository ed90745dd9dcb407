#ifndef CIS_CLASSIFIER_HPP
#define CIS_CLASSIFIER_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "cis/dataset.hpp"
#include "cis/error.hpp"
#include "cis/screening.hpp"
#include "cis/simgen.hpp"
#include "json.hpp"

namespace cis {

// Pairwise LDA rule on the selected features:
//   s(x) = (z_sel - midpoint)' * direction + offset,  z = standardized x,
// class a when s >= 0, class b otherwise.
struct FittedClassifier {
  ClassPair pair;
  FeatureSet selected;
  Eigen::VectorXd mu_a;
  Eigen::VectorXd mu_b;
  Eigen::VectorXd midpoint;
  Eigen::MatrixXd precision;  // symmetric, zero across blocks
  Eigen::VectorXd direction;  // precision * (mu_a - mu_b)
  ColumnScaling scaling;      // full length p
  double offset = 0.0;        // prior log-odds hook, 0 for equal priors

  double score(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    double s = offset;
    for (std::size_t a = 0; a < selected.size(); ++a) {
      const Index j = selected[a];
      const double z = (x(j) - scaling.center(j)) / scaling.scale(j);
      s += (z - midpoint(static_cast<Index>(a))) * direction(static_cast<Index>(a));
    }
    return s;
  }

  int predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return score(x) >= 0.0 ? pair.first : pair.second;
  }
};

namespace detail {

inline FittedClassifier assemble(const LabeledMatrix& standardized, const ColumnScaling& scaling,
                                 const ClassPair& pair, FeatureSet selected, Eigen::MatrixXd precision) {
  if (selected.empty()) throw EmptySelection();
  const auto counts = standardized.class_counts();
  for (int c : {pair.first, pair.second})
    if (c < 1 || c > standardized.classes() || counts[static_cast<std::size_t>(c - 1)] == 0) throw MissingClass(c);

  const Index k = static_cast<Index>(selected.size());
  FittedClassifier m;
  m.pair = pair;
  m.mu_a = Eigen::VectorXd::Zero(k);
  m.mu_b = Eigen::VectorXd::Zero(k);
  const auto& x = standardized.values();
  for (Index i = 0; i < standardized.rows(); ++i) {
    const int c = standardized.label(i);
    if (c != pair.first && c != pair.second) continue;
    auto& mu = c == pair.first ? m.mu_a : m.mu_b;
    for (Index a = 0; a < k; ++a) mu(a) += x(i, selected[static_cast<std::size_t>(a)]);
  }
  m.mu_a /= static_cast<double>(counts[static_cast<std::size_t>(pair.first - 1)]);
  m.mu_b /= static_cast<double>(counts[static_cast<std::size_t>(pair.second - 1)]);
  m.midpoint = 0.5 * (m.mu_a + m.mu_b);
  m.precision = std::move(precision);
  m.direction = m.precision * (m.mu_a - m.mu_b);
  m.selected = std::move(selected);
  m.scaling = scaling;
  return m;
}

}  // namespace detail

// Block precision restricted to `selected`; entries across blocks are zero.
inline Eigen::MatrixXd restricted_precision(const ScreeningResult& screening, std::span<const Index> selected) {
  std::unordered_map<Index, std::pair<std::size_t, Index>> where;
  for (std::size_t b = 0; b < screening.blocks.size(); ++b)
    for (std::size_t a = 0; a < screening.blocks[b].members.size(); ++a)
      where[screening.blocks[b].members[a]] = {b, static_cast<Index>(a)};
  const Index k = static_cast<Index>(selected.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k, k);
  for (Index a = 0; a < k; ++a) {
    auto ia = where.find(selected[static_cast<std::size_t>(a)]);
    if (ia == where.end()) throw InvalidData("selected feature outside the covered blocks");
    for (Index b = 0; b < k; ++b) {
      auto ib = where.find(selected[static_cast<std::size_t>(b)]);
      if (ib == where.end() || ib->second.first != ia->second.first) continue;
      out(a, b) = screening.blocks[ia->second.first].precision(ia->second.second, ib->second.second);
    }
  }
  return out;
}

// `standardized` is the training data after `scaling`; prediction applies
// `scaling` to raw inputs.
inline FittedClassifier fit_pair(const LabeledMatrix& standardized, const ColumnScaling& scaling,
                                 const ClassPair& pair, const ScreeningResult& screening) {
  if (screening.selected.empty()) throw EmptySelection();
  FeatureSet sel = screening.selected;
  std::sort(sel.begin(), sel.end());
  Eigen::MatrixXd omega = restricted_precision(screening, sel);
  return detail::assemble(standardized, scaling, pair, std::move(sel), std::move(omega));
}

// Independence rule (identity precision) on `selected`.
inline FittedClassifier fit_independence(const LabeledMatrix& standardized, const ColumnScaling& scaling,
                                         const ClassPair& pair, FeatureSet selected) {
  std::sort(selected.begin(), selected.end());
  const Index k = static_cast<Index>(selected.size());
  return detail::assemble(standardized, scaling, pair, std::move(selected), Eigen::MatrixXd::Identity(k, k));
}

// Rule with every parameter known: true informative set, true means and the
// exact inverse of the design covariance on that set. Applied to raw draws.
inline FittedClassifier fit_oracle(const SimDesign& design, const ClassPair& pair) {
  const GroundTruth truth = ground_truth(design, pair);
  if (truth.informative_set.empty()) throw EmptySelection();
  const Eigen::VectorXd mu_a_full = design.class_mean(pair.first);
  const Eigen::VectorXd mu_b_full = design.class_mean(pair.second);

  Eigen::MatrixXd omega_full = Eigen::MatrixXd::Identity(design.p, design.p);
  std::vector<Index> block_of(static_cast<std::size_t>(design.p), -1);
  for (std::size_t b = 0; b < design.blocks.size(); ++b) {
    const auto& blk = design.blocks[b];
    Eigen::LLT<Eigen::MatrixXd> llt(blk.covariance());
    omega_full.block(blk.first, blk.first, blk.size, blk.size) =
        llt.solve(Eigen::MatrixXd::Identity(blk.size, blk.size));
  }

  const auto& s = truth.informative_set;
  const Index k = static_cast<Index>(s.size());
  FittedClassifier m;
  m.pair = pair;
  m.selected = s;
  m.mu_a.resize(k);
  m.mu_b.resize(k);
  m.precision.resize(k, k);
  for (Index a = 0; a < k; ++a) {
    m.mu_a(a) = mu_a_full(s[static_cast<std::size_t>(a)]);
    m.mu_b(a) = mu_b_full(s[static_cast<std::size_t>(a)]);
    for (Index b = 0; b < k; ++b)
      m.precision(a, b) = omega_full(s[static_cast<std::size_t>(a)], s[static_cast<std::size_t>(b)]);
  }
  m.midpoint = 0.5 * (m.mu_a + m.mu_b);
  m.direction = m.precision * (m.mu_a - m.mu_b);
  m.scaling = ColumnScaling::identity(design.p);
  return m;
}

inline int predict_pair(const FittedClassifier& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return model.predict(x);
}

// One model per unordered class pair.
struct VotingEnsemble {
  int classes = 0;
  std::vector<FittedClassifier> members;

  void validate() const {
    if (static_cast<int>(members.size()) != classes * (classes - 1) / 2)
      throw InvalidData("ensemble needs one model per class pair");
  }
};

struct Vote {
  int label = 0;
  bool tied = false;  // several classes shared the top count; smallest id won
};

inline Vote predict_vote(const VotingEnsemble& ensemble, const Eigen::Ref<const Eigen::VectorXd>& x) {
  std::vector<int> votes(static_cast<std::size_t>(ensemble.classes) + 1, 0);
  for (const auto& m : ensemble.members) ++votes[static_cast<std::size_t>(m.predict(x))];
  Vote v{1, false};
  for (int c = 2; c <= ensemble.classes; ++c)
    if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(v.label)]) v.label = c;
  for (int c = 1; c <= ensemble.classes; ++c)
    if (c != v.label && votes[static_cast<std::size_t>(c)] == votes[static_cast<std::size_t>(v.label)]) v.tied = true;
  return v;
}

// Error over the test rows belonging to the model's two classes.
inline double misclassification_rate(const FittedClassifier& model, const LabeledMatrix& test) {
  Index n = 0, wrong = 0;
  for (Index i = 0; i < test.rows(); ++i) {
    const int c = test.label(i);
    if (c != model.pair.first && c != model.pair.second) continue;
    ++n;
    if (model.predict(test.values().row(i).transpose()) != c) ++wrong;
  }
  if (n == 0) throw InvalidData("test data has no rows of pair " + to_string(model.pair));
  return static_cast<double>(wrong) / static_cast<double>(n);
}

inline double misclassification_rate(const VotingEnsemble& ensemble, const LabeledMatrix& test) {
  if (test.rows() == 0) throw InvalidData("empty test data");
  Index wrong = 0;
  for (Index i = 0; i < test.rows(); ++i)
    if (predict_vote(ensemble, test.values().row(i).transpose()).label != test.label(i)) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(test.rows());
}

namespace detail {

inline nlohmann::json vec_json(const Eigen::VectorXd& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline Eigen::VectorXd json_vec(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace detail

// Feature indices are 1-based in the document.
inline nlohmann::json to_json(const FittedClassifier& m) {
  nlohmann::json j;
  j["pair"] = {m.pair.first, m.pair.second};
  std::vector<Index> sel;
  for (Index s : m.selected) sel.push_back(s + 1);
  j["selected"] = sel;
  j["mu_a"] = detail::vec_json(m.mu_a);
  j["mu_b"] = detail::vec_json(m.mu_b);
  j["midpoint"] = detail::vec_json(m.midpoint);
  j["direction"] = detail::vec_json(m.direction);
  nlohmann::json rows = nlohmann::json::array();
  for (Index a = 0; a < m.precision.rows(); ++a) rows.push_back(detail::vec_json(m.precision.row(a).transpose()));
  j["precision"] = rows;
  j["center"] = detail::vec_json(m.scaling.center);
  j["scale"] = detail::vec_json(m.scaling.scale);
  j["offset"] = m.offset;
  return j;
}

inline FittedClassifier classifier_from_json(const nlohmann::json& j) {
  FittedClassifier m;
  m.pair = {j.at("pair").at(0).get<int>(), j.at("pair").at(1).get<int>()};
  for (Index s : j.at("selected").get<std::vector<Index>>()) m.selected.push_back(s - 1);
  m.mu_a = detail::json_vec(j.at("mu_a"));
  m.mu_b = detail::json_vec(j.at("mu_b"));
  m.midpoint = detail::json_vec(j.at("midpoint"));
  m.direction = detail::json_vec(j.at("direction"));
  const Index k = static_cast<Index>(m.selected.size());
  m.precision.resize(k, k);
  for (Index a = 0; a < k; ++a) m.precision.row(a) = detail::json_vec(j.at("precision").at(static_cast<std::size_t>(a))).transpose();
  m.scaling.center = detail::json_vec(j.at("center"));
  m.scaling.scale = detail::json_vec(j.at("scale"));
  m.offset = j.value("offset", 0.0);
  if (m.direction.size() != k || m.midpoint.size() != k) throw InvalidData("model document has inconsistent lengths");
  return m;
}

}  // namespace cis

#endif  // CIS_CLASSIFIER_HPP
