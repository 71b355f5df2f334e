#pragma once

#include <stdexcept>
#include <string>

namespace shapefit {

//! Broad failure class; the CLI maps each one to a distinct exit code.
enum class ErrorKind
{
  usage,      // bad arguments or preconditions
  data,       // malformed or invalid input data
  numerical   // solver or optimizer failure
};

class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what)
    , kind_(kind)
  {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

class UsageError : public Error
{
public:
  explicit UsageError(const std::string& what)
    : Error(ErrorKind::usage, what)
  {}
};

class DataError : public Error
{
public:
  explicit DataError(const std::string& what)
    : Error(ErrorKind::data, what)
  {}
};

class NumericalError : public Error
{
public:
  explicit NumericalError(const std::string& what)
    : Error(ErrorKind::numerical, what)
  {}
};

} // namespace shapefit
