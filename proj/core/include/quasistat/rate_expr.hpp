#ifndef QUASISTAT_RATE_EXPR_HPP
#define QUASISTAT_RATE_EXPR_HPP

#include <cstdint>
#include <memory>
#include <string>

namespace quasistat {

// Arithmetic over the index variable i:
//   EXPR   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' integer)?
//   base   := 'i' | number | '(' EXPR ')'
// Parsing applies constant folding; the canonical printer round-trips
// through parse_rate.
class RateExpression {
public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  RateExpression() = default;
  explicit RateExpression(NodePtr root) : root_(std::move(root)) {}

  bool valid() const { return root_ != nullptr; }

  // Evaluate at index i. Throws InvalidSpec if the result is not finite
  // (division by zero inside the expression, overflow).
  double evaluate(std::int64_t i) const;

  // Canonical text form; parse_rate(print()) reproduces the AST.
  std::string print() const;

  const NodePtr& root() const { return root_; }

  // Substitute i -> i + shift, folding constants. Used by the duality
  // index maps so transformed specs stay in the expression grammar.
  RateExpression shift_index(std::int64_t shift) const;

private:
  NodePtr root_;
};

// Thrown with 1-based column position on malformed input.
class RateExprSyntaxError;

RateExpression parse_rate(const std::string& source);

}  // namespace quasistat

#endif
