#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixsmooth {

/// Precondition violation on a geometric or algebraic argument (bad dimension,
/// empty subset, mismatched active sets, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an expression cannot be evaluated at a point: log or sqrt
/// outside their domain, division by zero, or a non-finite intermediate.
/// `offset` is the 1-based source column of the offending node (0 when the
/// node was synthesized rather than parsed).
class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& what, std::size_t offset, std::string node)
      : std::runtime_error(what), offset_(offset), node_(std::move(node)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& node() const noexcept { return node_; }

 private:
  std::size_t offset_;
  std::string node_;
};

/// An integrand failed at a quadrature node. Carries the node so reports can
/// say where the failure happened.
class IntegrandError : public std::runtime_error {
 public:
  IntegrandError(const std::string& what, std::vector<double> point)
      : std::runtime_error(what), point_(std::move(point)) {}

  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

}  // namespace mixsmooth
