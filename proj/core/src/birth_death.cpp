#include "quasistat/birth_death.hpp"

#include <sstream>

#include "quasistat/errors.hpp"

namespace quasistat {

RateFunction RateFunction::from_expression(RateExpression expr) {
  RateFunction f;
  f.kind_ = Kind::Expression;
  f.expr_ = std::move(expr);
  return f;
}

RateFunction RateFunction::from_table(std::vector<double> values, std::int64_t first_index,
                                      std::optional<RateExpression> extension) {
  RateFunction f;
  f.kind_ = Kind::Table;
  f.table_ = std::move(values);
  f.table_first_ = first_index;
  f.extension_ = std::move(extension);
  return f;
}

RateFunction RateFunction::from_callable(std::function<double(std::int64_t)> fn) {
  RateFunction f;
  f.kind_ = Kind::Callable;
  f.callable_ = std::move(fn);
  return f;
}

double RateFunction::operator()(std::int64_t i) const {
  switch (kind_) {
    case Kind::Expression:
      return expr_.evaluate(i);
    case Kind::Callable:
      return callable_(i);
    case Kind::Table: {
      const std::int64_t off = i - table_first_;
      if (off >= 0 && off < static_cast<std::int64_t>(table_.size())) {
        return table_[static_cast<std::size_t>(off)];
      }
      if (extension_) return extension_->evaluate(i);
      std::ostringstream os;
      os << "rate table covers [" << table_first_ << ", "
         << table_first_ + static_cast<std::int64_t>(table_.size()) - 1
         << "] and has no extension rule; index " << i << " requested";
      throw InvalidSpec(os.str());
    }
  }
  throw InvalidSpec("uninitialized rate function");
}

std::optional<std::int64_t> RateFunction::max_index() const {
  if (kind_ == Kind::Table && !extension_) {
    return table_first_ + static_cast<std::int64_t>(table_.size()) - 1;
  }
  return std::nullopt;
}

BirthDeathSpec::BirthDeathSpec(RateFunction birth, RateFunction death, Convention convention)
    : birth_(std::move(birth)), death_(std::move(death)), convention_(convention) {}

double BirthDeathSpec::birth(std::int64_t i) const {
  if (i < first_state()) return 0.0;
  const double b = birth_(i);
  if (!(b > 0.0)) {
    std::ostringstream os;
    os << "birth rate b_" << i << " = " << b << " is not strictly positive";
    throw InvalidSpec(os.str());
  }
  return b;
}

double BirthDeathSpec::death(std::int64_t i) const {
  if (i < 1) return 0.0;  // d_0 = 0 in both conventions
  const double d = death_(i);
  if (!(d > 0.0)) {
    std::ostringstream os;
    os << "death rate d_" << i << " = " << d << " is not strictly positive";
    throw InvalidSpec(os.str());
  }
  return d;
}

std::optional<std::int64_t> BirthDeathSpec::max_state() const {
  const auto mb = birth_.max_index();
  const auto md = death_.max_index();
  if (!mb && !md) return std::nullopt;
  if (mb && md) return std::min(*mb, *md);
  return mb ? mb : md;
}

void BirthDeathSpec::validate(std::int64_t probe_to) const {
  std::int64_t hi = probe_to;
  if (const auto m = max_state()) hi = std::min(hi, *m);
  for (std::int64_t i = first_state(); i <= hi; ++i) {
    birth(i);
    if (i >= 1) death(i);
  }
}

}  // namespace quasistat
