#ifndef CIS_ERROR_HPP
#define CIS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cis {

// Base of every error the library throws. `stage()` names the pipeline
// stage so the CLI can print a single-line diagnostic.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class InvalidData : public Error {
 public:
  explicit InvalidData(const std::string& what) : Error("dataset", what) {}
};

class ZeroVarianceColumn : public Error {
 public:
  explicit ZeroVarianceColumn(long column)
      : Error("dataset", "zero-variance column " + std::to_string(column + 1)),
        column_(column) {}
  long column() const noexcept { return column_; }

 private:
  long column_;
};

class EmptyClass : public Error {
 public:
  explicit EmptyClass(int label)
      : Error("dataset", "class " + std::to_string(label) + " has no samples"),
        label_(label) {}
  int label() const noexcept { return label_; }

 private:
  int label_;
};

class UnknownExample : public Error {
 public:
  explicit UnknownExample(int which)
      : Error("simgen", "unknown example " + std::to_string(which) + " (expected 1, 2 or 3)") {}
};

class NonPositiveDefiniteBlock : public Error {
 public:
  explicit NonPositiveDefiniteBlock(const std::string& what) : Error("simgen", what) {}
};

class BudgetTooSmall : public Error {
 public:
  explicit BudgetTooSmall(const std::string& what) : Error("covgraph", what) {}
};

class NotStandardized : public Error {
 public:
  explicit NotStandardized(long column)
      : Error("covgraph", "column " + std::to_string(column + 1) + " is not standardized") {}
};

class SingularBlock : public Error {
 public:
  explicit SingularBlock(long component)
      : Error("screening", "block of component " + std::to_string(component + 1) +
                               " is singular after ridge retries"),
        component_(component) {}
  long component() const noexcept { return component_; }

 private:
  long component_;
};

class EmptySelection : public Error {
 public:
  EmptySelection() : Error("classifier", "screening selected no features") {}
};

class MissingClass : public Error {
 public:
  explicit MissingClass(int label)
      : Error("classifier", "class " + std::to_string(label) + " missing from training data") {}
};

class FoldTooSmall : public Error {
 public:
  explicit FoldTooSmall(const std::string& what) : Error("tuning", what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("boundary", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace cis

#endif  // CIS_ERROR_HPP
