#pragma once

#include <memory>
#include <string>

namespace lakevort {

// Arithmetic expression in one variable `t`, used for custom depth profiles.
// Grammar: numbers, t, pi, + - * / ^ (right associative), parentheses and the
// functions exp, log, sqrt, sin, cos, tanh, abs, min(a,b), max(a,b).
class Expression {
 public:
  static Expression parse(const std::string& text);

  double operator()(double t) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace lakevort
