#ifndef QUASISTAT_ERRORS_HPP
#define QUASISTAT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace quasistat {

// Base class for all toolkit errors. Subclasses split into two broad
// families used by the CLI exit-code mapping: precondition violations
// (bad inputs, contract misuse) and numerical failures (the inputs were
// fine but the computation could not deliver the requested accuracy).
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class PreconditionError : public Error {
public:
  using Error::Error;
};

class NumericalError : public Error {
public:
  using Error::Error;
};

// -- precondition family ----------------------------------------------------

class InvalidSpec : public PreconditionError {
public:
  using PreconditionError::PreconditionError;
};

class NotIrreducible : public PreconditionError {
public:
  using PreconditionError::PreconditionError;
};

class PreconditionFailed : public PreconditionError {
public:
  using PreconditionError::PreconditionError;
};

class InsufficientSurvivors : public PreconditionError {
public:
  using PreconditionError::PreconditionError;
};

class DegenerateRatio : public PreconditionError {
public:
  using PreconditionError::PreconditionError;
};

// -- numerical family --------------------------------------------------------

class NumericOverflow : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class SpectralFailure : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NotSummable : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class IdentityViolation : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class HorizonTooDeep : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class ExcursionCapHit : public NumericalError {
public:
  using NumericalError::NumericalError;
};

}  // namespace quasistat

#endif
