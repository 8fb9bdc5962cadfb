#include "quasistat/rate_expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "quasistat/errors.hpp"

namespace quasistat {

enum class ExprOp { Constant, Index, Add, Sub, Mul, Div, Pow };

struct RateExpression::Node {
  ExprOp op = ExprOp::Constant;
  double constant = 0.0;      // Constant
  std::int64_t exponent = 0;  // Pow
  NodePtr lhs, rhs;
};

namespace {

using Node = RateExpression::Node;
using NodePtr = RateExpression::NodePtr;

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->op = ExprOp::Constant;
  n->constant = v;
  return n;
}

NodePtr make_index() {
  auto n = std::make_shared<Node>();
  n->op = ExprOp::Index;
  return n;
}

NodePtr make_binary(ExprOp op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

NodePtr make_pow(NodePtr base, std::int64_t k) {
  auto n = std::make_shared<Node>();
  n->op = ExprOp::Pow;
  n->lhs = std::move(base);
  n->exponent = k;
  return n;
}

double eval_node(const Node& n, std::int64_t i) {
  switch (n.op) {
    case ExprOp::Constant: return n.constant;
    case ExprOp::Index: return static_cast<double>(i);
    case ExprOp::Add: return eval_node(*n.lhs, i) + eval_node(*n.rhs, i);
    case ExprOp::Sub: return eval_node(*n.lhs, i) - eval_node(*n.rhs, i);
    case ExprOp::Mul: return eval_node(*n.lhs, i) * eval_node(*n.rhs, i);
    case ExprOp::Div: return eval_node(*n.lhs, i) / eval_node(*n.rhs, i);
    case ExprOp::Pow: return std::pow(eval_node(*n.lhs, i), static_cast<double>(n.exponent));
  }
  return 0.0;
}

bool is_const(const NodePtr& n) { return n->op == ExprOp::Constant; }

// Fold a binary node whose children are already folded.
NodePtr fold(ExprOp op, NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) {
    const Node tmp{op, 0.0, 0, a, b};
    const double v = eval_node(tmp, 0);
    if (!std::isfinite(v)) throw InvalidSpec("rate expression folds to a non-finite constant");
    return make_const(v);
  }
  return make_binary(op, std::move(a), std::move(b));
}

NodePtr fold_pow(NodePtr base, std::int64_t k) {
  if (is_const(base)) {
    const double v = std::pow(base->constant, static_cast<double>(k));
    if (!std::isfinite(v)) throw InvalidSpec("rate expression folds to a non-finite constant");
    return make_const(v);
  }
  return make_pow(std::move(base), k);
}

class Parser {
public:
  explicit Parser(const std::string& src) : src_(src) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return e;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "rate expression syntax error at column " << (pos_ + 1) << ": " << msg;
    throw InvalidSpec(os.str());
  }

private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  NodePtr expr() {
    NodePtr acc = term();
    for (;;) {
      if (consume('+')) {
        acc = fold(ExprOp::Add, acc, term());
      } else if (consume('-')) {
        acc = fold(ExprOp::Sub, acc, term());
      } else {
        return acc;
      }
    }
  }

  NodePtr term() {
    NodePtr acc = factor();
    for (;;) {
      if (consume('*')) {
        acc = fold(ExprOp::Mul, acc, factor());
      } else if (consume('/')) {
        acc = fold(ExprOp::Div, acc, factor());
      } else {
        return acc;
      }
    }
  }

  NodePtr factor() {
    NodePtr b = base();
    if (consume('^')) {
      return fold_pow(std::move(b), integer());
    }
    return b;
  }

  NodePtr base() {
    skip_ws();
    if (pos_ >= src_.size()) fail("expected 'i', a number, or '('");
    const char c = src_[pos_];
    if (c == 'i') {
      ++pos_;
      return make_index();
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return make_const(number());
    }
    fail("expected 'i', a number, or '('");
  }

  double number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' ||
            src_[pos_] == 'e' || src_[pos_] == 'E' ||
            ((src_[pos_] == '+' || src_[pos_] == '-') && pos_ > start &&
             (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E')))) {
      ++pos_;
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(src_.substr(start, pos_ - start), &used);
      if (used != pos_ - start) {
        pos_ = start + used;
        fail("malformed number");
      }
      return v;
    } catch (const std::logic_error&) {
      pos_ = start;
      fail("malformed number");
    }
  }

  std::int64_t integer() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < src_.size() && src_[pos_] == '-') ++pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ == start || (src_[start] == '-' && pos_ == start + 1)) {
      fail("expected integer exponent");
    }
    return std::stoll(src_.substr(start, pos_ - start));
  }

  const std::string& src_;
  std::size_t pos_ = 0;
};

int precedence(ExprOp op) {
  switch (op) {
    case ExprOp::Add:
    case ExprOp::Sub: return 1;
    case ExprOp::Mul:
    case ExprOp::Div: return 2;
    case ExprOp::Pow: return 3;
    default: return 4;
  }
}

// Shortest text that parses back to the same double.
std::string format_double(double v) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

void print_node(const Node& n, std::ostream& os, int parent_prec, bool rhs_of_noncommutative) {
  // The grammar has no unary minus, so folded negative constants render
  // as a subtraction from zero.
  if (n.op == ExprOp::Constant && n.constant < 0.0) {
    const int prec = precedence(ExprOp::Sub);
    const bool need_parens = prec < parent_prec || (prec == parent_prec && rhs_of_noncommutative);
    if (need_parens) os << '(';
    os << "0-" << format_double(-n.constant);
    if (need_parens) os << ')';
    return;
  }
  const int prec = precedence(n.op);
  const bool need_parens =
      prec < parent_prec || (prec == parent_prec && rhs_of_noncommutative);
  if (need_parens) os << '(';
  switch (n.op) {
    case ExprOp::Constant:
      os << format_double(n.constant);
      break;
    case ExprOp::Index: os << 'i'; break;
    case ExprOp::Add:
      print_node(*n.lhs, os, prec, false);
      os << '+';
      print_node(*n.rhs, os, prec, false);
      break;
    case ExprOp::Sub:
      print_node(*n.lhs, os, prec, false);
      os << '-';
      print_node(*n.rhs, os, prec, true);
      break;
    case ExprOp::Mul:
      print_node(*n.lhs, os, prec, false);
      os << '*';
      print_node(*n.rhs, os, prec, false);
      break;
    case ExprOp::Div:
      print_node(*n.lhs, os, prec, false);
      os << '/';
      print_node(*n.rhs, os, prec, true);
      break;
    case ExprOp::Pow:
      print_node(*n.lhs, os, prec + 1, false);
      os << '^' << n.exponent;
      break;
  }
  if (need_parens) os << ')';
}

NodePtr shift_node(const Node& n, std::int64_t shift) {
  switch (n.op) {
    case ExprOp::Constant: return make_const(n.constant);
    case ExprOp::Index:
      if (shift == 0) return make_index();
      if (shift > 0) return make_binary(ExprOp::Add, make_index(), make_const(double(shift)));
      return make_binary(ExprOp::Sub, make_index(), make_const(double(-shift)));
    case ExprOp::Pow: return fold_pow(shift_node(*n.lhs, shift), n.exponent);
    default:
      return fold(n.op, shift_node(*n.lhs, shift), shift_node(*n.rhs, shift));
  }
}

}  // namespace

double RateExpression::evaluate(std::int64_t i) const {
  if (!root_) throw InvalidSpec("empty rate expression");
  const double v = eval_node(*root_, i);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "rate expression '" << print() << "' is not finite at i=" << i;
    throw InvalidSpec(os.str());
  }
  return v;
}

std::string RateExpression::print() const {
  if (!root_) return std::string();
  std::ostringstream os;
  print_node(*root_, os, 0, false);
  return os.str();
}

RateExpression RateExpression::shift_index(std::int64_t shift) const {
  if (!root_) return RateExpression();
  return RateExpression(shift_node(*root_, shift));
}

RateExpression parse_rate(const std::string& source) {
  Parser p(source);
  return RateExpression(p.parse());
}

}  // namespace quasistat
