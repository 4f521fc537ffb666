#pragma once

#include <stdexcept>
#include <string>

namespace qkd {

// Base for every failure raised by the library. Callers that only care about
// success/failure catch this; the CLI maps it to exit status 1.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

// Multi-photon probability exceeds the observed gain: every detection could
// come from a tagged pulse, so no secure key can be distilled.
class PnsInsecureError : public Error {
public:
  using Error::Error;
};

// Decoy-state lower bound on the single-photon gain is not positive.
class EstimatorCollapseError : public Error {
public:
  using Error::Error;
};

// Channel gain underflowed to zero.
class DegenerateChannelError : public Error {
public:
  using Error::Error;
};

class NoPositiveRateError : public Error {
public:
  using Error::Error;
};

// Malformed input file or flag value.
class ParseError : public Error {
public:
  using Error::Error;
};

// A ratio in the raw-count reduction has a zero denominator.
class ZeroCountError : public Error {
public:
  using Error::Error;
};

// Wraps an error raised inside a multi-stage pipeline with the stage name.
class StageError : public Error {
public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

}  // namespace qkd
