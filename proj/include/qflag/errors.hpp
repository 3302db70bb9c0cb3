#ifndef QFLAG_ERRORS_HPP
#define QFLAG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qflag {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionError : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class NotTraceless : public Error {
public:
  using Error::Error;
};

class ConventionMismatch : public Error {
public:
  using Error::Error;
};

class InvalidDensity : public Error {
public:
  using Error::Error;
};

class NotPositive : public Error {
public:
  using Error::Error;
};

class TooLarge : public Error {
public:
  using Error::Error;
};

class StepError : public Error {
public:
  using Error::Error;
};

class NotStronglyRegular : public Error {
public:
  using Error::Error;
};

class NoConvergence : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace qflag

#endif  // QFLAG_ERRORS_HPP
