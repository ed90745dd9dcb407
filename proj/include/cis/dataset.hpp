#ifndef CIS_DATASET_HPP
#define CIS_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cis/error.hpp"
#include "cis/io.hpp"

namespace cis {

using Index = Eigen::Index;
using FeatureSet = std::vector<Index>;

// Two class ids (dense, 1-based) compared by a pairwise screening/classifier.
struct ClassPair {
  int first = 1;
  int second = 2;
  friend bool operator==(const ClassPair&, const ClassPair&) = default;
};

inline std::string to_string(const ClassPair& pair) {
  return std::to_string(pair.first) + "-" + std::to_string(pair.second);
}

// n x p feature matrix with a dense class label in 1..K per row.
//
// Labels supplied to from_raw() may be any distinct integers; they are
// remapped to 1..K in ascending order and the original ids are kept in
// label_ids() so writers can emit them unchanged.
class LabeledMatrix {
 public:
  LabeledMatrix() = default;

  static LabeledMatrix from_raw(Eigen::MatrixXd values, std::span<const int> raw_labels,
                                std::vector<std::string> feature_names = {},
                                Index min_per_class = 2) {
    if (static_cast<Index>(raw_labels.size()) != values.rows())
      throw InvalidData("label count " + std::to_string(raw_labels.size()) +
                        " does not match row count " + std::to_string(values.rows()));
    if (!values.allFinite()) throw InvalidData("non-finite entry in feature matrix");

    std::vector<int> ids(raw_labels.begin(), raw_labels.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.size() < 2) throw InvalidData("at least two classes are required");

    std::map<int, int> dense;
    for (std::size_t k = 0; k < ids.size(); ++k) dense[ids[k]] = static_cast<int>(k) + 1;
    std::vector<int> labels;
    labels.reserve(raw_labels.size());
    for (int raw : raw_labels) labels.push_back(dense[raw]);

    const int K = static_cast<int>(ids.size());
    LabeledMatrix out(std::move(values), std::move(labels), K, std::move(ids), std::move(feature_names));
    auto counts = out.class_counts();
    for (int k = 1; k <= out.classes(); ++k)
      if (counts[static_cast<std::size_t>(k - 1)] < min_per_class)
        throw InvalidData("class " + std::to_string(out.label_ids_[static_cast<std::size_t>(k - 1)]) +
                          " has fewer than " + std::to_string(min_per_class) + " samples");
    return out;
  }

  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }
  int classes() const noexcept { return classes_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  int label(Index row) const { return labels_[static_cast<std::size_t>(row)]; }
  const std::vector<int>& label_ids() const noexcept { return label_ids_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

  std::vector<Index> class_counts() const {
    std::vector<Index> counts(static_cast<std::size_t>(classes_), 0);
    for (int y : labels_) ++counts[static_cast<std::size_t>(y - 1)];
    return counts;
  }

  std::vector<Index> rows_of_class(int k) const {
    std::vector<Index> out;
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == k) out.push_back(static_cast<Index>(i));
    return out;
  }

  std::vector<Index> rows_of_pair(const ClassPair& pair) const {
    std::vector<Index> out;
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == pair.first || labels_[i] == pair.second) out.push_back(static_cast<Index>(i));
    return out;
  }

  // Row subset keeping the class numbering; classes may become empty.
  LabeledMatrix subset(std::span<const Index> row_ids) const {
    Eigen::MatrixXd v(static_cast<Index>(row_ids.size()), cols());
    std::vector<int> labels;
    labels.reserve(row_ids.size());
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
      v.row(static_cast<Index>(i)) = values_.row(row_ids[i]);
      labels.push_back(labels_[static_cast<std::size_t>(row_ids[i])]);
    }
    return LabeledMatrix(std::move(v), std::move(labels), classes_, label_ids_, feature_names_);
  }

  LabeledMatrix with_values(Eigen::MatrixXd values) const {
    return LabeledMatrix(std::move(values), labels_, classes_, label_ids_, feature_names_);
  }

 private:
  LabeledMatrix(Eigen::MatrixXd values, std::vector<int> labels, int classes,
                std::vector<int> label_ids, std::vector<std::string> names)
      : values_(std::move(values)),
        labels_(std::move(labels)),
        classes_(classes),
        label_ids_(std::move(label_ids)),
        feature_names_(std::move(names)) {
    if (feature_names_.empty()) {
      feature_names_.reserve(static_cast<std::size_t>(values_.cols()));
      for (Index j = 0; j < values_.cols(); ++j) feature_names_.push_back("x" + std::to_string(j + 1));
    }
  }

  Eigen::MatrixXd values_;
  std::vector<int> labels_;
  int classes_ = 0;
  std::vector<int> label_ids_;
  std::vector<std::string> feature_names_;
};

// Column centers and scales (sample sd, divisor n-1).
struct ColumnScaling {
  Eigen::VectorXd center;
  Eigen::VectorXd scale;

  static ColumnScaling identity(Index p) {
    return {Eigen::VectorXd::Zero(p), Eigen::VectorXd::Ones(p)};
  }
};

inline ColumnScaling column_scaling(const LabeledMatrix& data) {
  const Index n = data.rows();
  if (n < 2) throw InvalidData("standardization needs at least two rows");
  const auto& x = data.values();
  ColumnScaling s;
  s.center = x.colwise().mean().transpose();
  s.scale.resize(x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    double ss = (x.col(j).array() - s.center(j)).square().sum();
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(s.center(j))))) throw ZeroVarianceColumn(j);
    s.scale(j) = sd;
  }
  return s;
}

inline LabeledMatrix apply_scaling(const LabeledMatrix& data, const ColumnScaling& s) {
  Eigen::MatrixXd z = (data.values().rowwise() - s.center.transpose()).array().rowwise() /
                      s.scale.transpose().array();
  return data.with_values(std::move(z));
}

// Global columnwise standardization: mean 0, sample sd 1.
inline LabeledMatrix standardize_columns(const LabeledMatrix& data) {
  return apply_scaling(data, column_scaling(data));
}

struct ClassSummary {
  std::vector<Index> class_counts;
  Eigen::MatrixXd class_means;  // K x p
  Eigen::VectorXd pooled_sd;    // within-class, divisor n - K

  Eigen::VectorXd mean_difference(const ClassPair& pair) const {
    return (class_means.row(pair.first - 1) - class_means.row(pair.second - 1)).transpose();
  }
};

// With allow_empty, an empty class gets a zero mean row instead of EmptyClass.
inline ClassSummary class_summaries(const LabeledMatrix& data, bool allow_empty = false) {
  const int K = data.classes();
  const Index p = data.cols();
  ClassSummary out;
  out.class_counts = data.class_counts();
  for (int k = 1; k <= K; ++k)
    if (out.class_counts[static_cast<std::size_t>(k - 1)] == 0 && !allow_empty) throw EmptyClass(k);

  out.class_means = Eigen::MatrixXd::Zero(K, p);
  const auto& x = data.values();
  for (Index i = 0; i < data.rows(); ++i) out.class_means.row(data.label(i) - 1) += x.row(i);
  for (int k = 0; k < K; ++k)
    if (out.class_counts[static_cast<std::size_t>(k)] > 0)
      out.class_means.row(k) /= static_cast<double>(out.class_counts[static_cast<std::size_t>(k)]);

  Eigen::VectorXd ss = Eigen::VectorXd::Zero(p);
  for (Index i = 0; i < data.rows(); ++i)
    ss += (x.row(i) - out.class_means.row(data.label(i) - 1)).transpose().array().square().matrix();
  const Index nonempty = std::count_if(out.class_counts.begin(), out.class_counts.end(), [](Index c) { return c > 0; });
  const double dof = static_cast<double>(std::max<Index>(data.rows() - nonempty, 1));
  out.pooled_sd = (ss / dof).array().sqrt();
  return out;
}

// CSV layout: header row, first column `label`, then one numeric column per feature.
inline LabeledMatrix read_csv(const std::filesystem::path& path) {
  const std::string text = io::read_file(path);
  std::vector<std::string_view> lines;
  for (auto line : io::split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw IoError(path.string() + ": empty file");
  auto header = io::split(lines[0]);
  if (header.empty() || header[0] != "label")
    throw IoError(path.string() + ": first header column must be 'label'");
  const Index p = static_cast<Index>(header.size()) - 1;
  const Index n = static_cast<Index>(lines.size()) - 1;
  std::vector<std::string> names;
  for (std::size_t j = 1; j < header.size(); ++j) names.emplace_back(header[j]);

  Eigen::MatrixXd values(n, p);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const std::string ctx = path.string() + ":" + std::to_string(i + 2);
    auto cells = io::split(lines[static_cast<std::size_t>(i) + 1]);
    if (static_cast<Index>(cells.size()) != p + 1)
      throw IoError(ctx + ": expected " + std::to_string(p + 1) + " columns");
    labels[static_cast<std::size_t>(i)] = static_cast<int>(io::parse_long(cells[0], ctx));
    for (Index j = 0; j < p; ++j) values(i, j) = io::parse_double(cells[static_cast<std::size_t>(j) + 1], ctx);
  }
  return LabeledMatrix::from_raw(std::move(values), labels, std::move(names));
}

inline std::string to_csv(const LabeledMatrix& data) {
  std::string out = "label";
  for (const auto& name : data.feature_names()) out += "," + name;
  out += '\n';
  for (Index i = 0; i < data.rows(); ++i) {
    out += std::to_string(data.label_ids()[static_cast<std::size_t>(data.label(i) - 1)]);
    for (Index j = 0; j < data.cols(); ++j) {
      out += ',';
      out += io::format_double(data.values()(i, j));
    }
    out += '\n';
  }
  return out;
}

inline void write_csv(const std::filesystem::path& path, const LabeledMatrix& data) {
  io::write_atomic(path, to_csv(data));
}

}  // namespace cis

#endif  // CIS_DATASET_HPP
