#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace spde {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called outside its documented domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A kernel family without a Fourier symbol was asked for one.
class SymbolUnavailable : public Error {
 public:
  using Error::Error;
};

/// The grid does not resolve the spectral multiplier (aliasing).
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// An integral that was required to be finite could not be shown to be.
class IntegrabilityError : public Error {
 public:
  IntegrabilityError(const std::string& what, std::vector<double> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

/// Two independent evaluation routes disagreed beyond tolerance.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// NaN or overflow in an iterate.
class NumericalBreakdown : public Error {
 public:
  NumericalBreakdown(const std::string& what, int iterate) : Error(what), iterate_(iterate) {}
  int iterate() const { return iterate_; }

 private:
  int iterate_;
};

/// Configuration rejected; carries the dotted path of the offending key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

void require(bool condition, const std::string& message);

}  // namespace spde
