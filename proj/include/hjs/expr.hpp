#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hjs {

/// Second-order forward-mode jet over at most kMaxVars variables.
struct Jet {
  static constexpr int kMaxVars = 6;
  double val = 0.0;
  std::array<double, kMaxVars> grad{};
  std::array<double, kMaxVars * kMaxVars> hess{};

  static Jet constant(double c) {
    Jet j;
    j.val = c;
    return j;
  }
  static Jet variable(double value, int index) {
    Jet j;
    j.val = value;
    j.grad[index] = 1.0;
    return j;
  }
  double h(int i, int k) const { return hess[i * kMaxVars + k]; }
};

/// Arithmetic expression over named scalar variables.
///
/// Grammar: numbers, variables, unary minus, + - * / ^ (right associative),
/// and the functions sin, cos, exp, abs, min, max. Variables are bound by
/// position through the name list given at parse time. A bare `x` (or `v`)
/// is accepted as `x1` when the list has x1 but no x2.
class Expression {
 public:
  Expression() = default;

  /// Parses `text`; every identifier must appear in `variables`.
  static Expression parse(const std::string& text, const std::vector<std::string>& variables);

  double eval(std::span<const double> args) const;

  /// Value, gradient and Hessian with respect to all arguments.
  /// Requires args.size() <= Jet::kMaxVars.
  Jet eval_jet(std::span<const double> args) const;

  /// True if the variable at `index` occurs in the expression.
  bool uses(int index) const;

  const std::string& text() const { return text_; }
  bool empty() const { return root_ == nullptr; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  std::vector<bool> used_;
};

/// Variable names x1..xn followed by v1..vn.
std::vector<std::string> state_variable_names(int dim);
/// Variable names x1..xn.
std::vector<std::string> position_variable_names(int dim);

}  // namespace hjs
