#ifndef QUASISTAT_BIRTH_DEATH_HPP
#define QUASISTAT_BIRTH_DEATH_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "quasistat/rate_expr.hpp"

namespace quasistat {

// Boundary convention at state 0.
//   AbsorbedAtZero:   states 1,2,...; d_0 = b_0 = 0; d_1 flows into the
//                     cemetery. Rates are defined for i >= 1.
//   ReflectingAtZero: states 0,1,...; d_0 = 0, b_0 > 0. Rates are defined
//                     for i >= 0 (births) and i >= 1 (deaths).
enum class Convention { AbsorbedAtZero, ReflectingAtZero };

// A rate sequence i -> rate, one of:
//  - a closed-form expression in i,
//  - a finite table with an optional closed-form extension rule,
//  - an opaque callable (for derived processes such as the h-process).
// Tables without an extension restrict every consumer to the table range.
class RateFunction {
public:
  RateFunction() = default;

  static RateFunction from_expression(RateExpression expr);
  static RateFunction from_table(std::vector<double> values, std::int64_t first_index,
                                 std::optional<RateExpression> extension = std::nullopt);
  static RateFunction from_callable(std::function<double(std::int64_t)> fn);

  // Rate at index i; throws InvalidSpec on nonpositive or out-of-range values.
  double operator()(std::int64_t i) const;

  // Largest queryable index, or nullopt when unbounded.
  std::optional<std::int64_t> max_index() const;

  bool is_expression() const { return kind_ == Kind::Expression; }
  bool is_table() const { return kind_ == Kind::Table; }
  bool is_callable() const { return kind_ == Kind::Callable; }

  const RateExpression& expression() const { return expr_; }
  const std::vector<double>& table() const { return table_; }
  std::int64_t table_first_index() const { return table_first_; }
  const std::optional<RateExpression>& extension() const { return extension_; }

private:
  enum class Kind { Expression, Table, Callable };
  Kind kind_ = Kind::Expression;
  RateExpression expr_;
  std::vector<double> table_;
  std::int64_t table_first_ = 1;
  std::optional<RateExpression> extension_;
  std::function<double(std::int64_t)> callable_;
};

// Birth-death process specification over the nonnegative integers, with the
// state-0 behaviour selected by the convention.
class BirthDeathSpec {
public:
  BirthDeathSpec() = default;
  BirthDeathSpec(RateFunction birth, RateFunction death, Convention convention);

  Convention convention() const { return convention_; }

  // Smallest state index carrying dynamics: 1 (absorbed) or 0 (reflecting).
  std::int64_t first_state() const {
    return convention_ == Convention::AbsorbedAtZero ? 1 : 0;
  }

  // Birth rate b_i. Zero at masked boundary indices, strictly positive
  // elsewhere (checked on access).
  double birth(std::int64_t i) const;
  // Death rate d_i, with d_0 = 0 in both conventions.
  double death(std::int64_t i) const;

  // Largest state with defined rates, or nullopt when unbounded.
  std::optional<std::int64_t> max_state() const;

  // Throws InvalidSpec unless every state in [first_state(), probe_to]
  // has valid rates.
  void validate(std::int64_t probe_to = 16) const;

  const RateFunction& birth_function() const { return birth_; }
  const RateFunction& death_function() const { return death_; }

private:
  RateFunction birth_;
  RateFunction death_;
  Convention convention_ = Convention::AbsorbedAtZero;
};

}  // namespace quasistat

#endif
