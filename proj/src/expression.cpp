#include "lakevort/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "lakevort/error.hpp"

namespace lakevort {

struct Expression::Node {
  enum class Kind { Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call1, Call2 } kind;
  double value = 0.0;
  std::string name;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(double t) const {
    switch (kind) {
      case Kind::Constant: return value;
      case Kind::Variable: return t;
      case Kind::Negate: return -args[0]->eval(t);
      case Kind::Add: return args[0]->eval(t) + args[1]->eval(t);
      case Kind::Sub: return args[0]->eval(t) - args[1]->eval(t);
      case Kind::Mul: return args[0]->eval(t) * args[1]->eval(t);
      case Kind::Div: return args[0]->eval(t) / args[1]->eval(t);
      case Kind::Pow: return std::pow(args[0]->eval(t), args[1]->eval(t));
      case Kind::Call1: {
        const double a = args[0]->eval(t);
        if (name == "exp") return std::exp(a);
        if (name == "log") return std::log(a);
        if (name == "sqrt") return std::sqrt(a);
        if (name == "sin") return std::sin(a);
        if (name == "cos") return std::cos(a);
        if (name == "tanh") return std::tanh(a);
        return std::fabs(a);
      }
      case Kind::Call2: {
        const double a = args[0]->eval(t);
        const double b = args[1]->eval(t);
        return name == "min" ? std::min(a, b) : std::max(a, b);
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind kind, std::vector<NodePtr> args = {}, double value = 0.0, std::string name = {}) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = kind;
  n->value = value;
  n->name = std::move(name);
  n->args = std::move(args);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Config, "expression '" + s_ + "': " + msg + " at offset " +
                                       std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Kind::Add, {lhs, term()});
      else if (accept('-')) lhs = make(Kind::Sub, {lhs, term()});
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Kind::Mul, {lhs, unary()});
      else if (accept('/')) lhs = make(Kind::Div, {lhs, unary()});
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Negate, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Kind::Pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (accept('(')) {
      NodePtr n = expr();
      if (!accept(')')) fail("missing ')'");
      return n;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Kind::Constant, {}, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string id;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        id += s_[pos_++];
      }
      if (id == "t") return make(Kind::Variable);
      if (id == "pi") return make(Kind::Constant, {}, std::numbers::pi);
      static const std::vector<std::string> unary_fns = {"exp", "log", "sqrt", "sin", "cos", "tanh", "abs"};
      const bool is_unary = std::find(unary_fns.begin(), unary_fns.end(), id) != unary_fns.end();
      const bool is_binary = id == "min" || id == "max";
      if (!is_unary && !is_binary) fail("unknown identifier '" + id + "'");
      if (!accept('(')) fail("expected '(' after " + id);
      NodePtr a = expr();
      if (is_binary) {
        if (!accept(',')) fail("expected ',' in " + id);
        NodePtr b = expr();
        if (!accept(')')) fail("missing ')'");
        return make(Kind::Call2, {a, b}, 0.0, id);
      }
      if (!accept(')')) fail("missing ')'");
      return make(Kind::Call1, {a}, 0.0, id);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  e.root_ = Parser(text).parse();
  return e;
}

double Expression::operator()(double t) const { return root_ ? root_->eval(t) : 0.0; }

}  // namespace lakevort
