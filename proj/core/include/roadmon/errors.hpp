#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace roadmon {

/// Base class for all roadmon errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A log row with the wrong field count, an unparsable number, an
/// out-of-range value, or a backward timestamp. Carries the 1-based line
/// number of the offending row.
class MalformedLine : public Error {
 public:
  MalformedLine(std::size_t line_no, const std::string& what)
      : Error("line " + std::to_string(line_no) + ": " + what), line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

/// The whole stream carried no valid GPS fix.
class NoGpsFix : public Error {
 public:
  NoGpsFix() : Error("stream contains no valid GPS fix") {}
};

class EmptySignal : public Error {
 public:
  EmptySignal() : Error("empty signal") {}
};

class NonpositiveRate : public Error {
 public:
  explicit NonpositiveRate(double fs)
      : Error("sample rate must be positive, got " + std::to_string(fs)) {}
};

/// Window has too few samples for spectral analysis.
class TooShort : public Error {
 public:
  using Error::Error;
};

class ProfileTooShort : public Error {
 public:
  using Error::Error;
};

/// Training data too small or otherwise unusable.
class DegenerateData : public Error {
 public:
  using Error::Error;
};

class ModelEmpty : public Error {
 public:
  ModelEmpty() : Error("model has no trees") {}
};

class SchemaVersionMismatch : public Error {
 public:
  using Error::Error;
};

class CorruptModel : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

/// Feature table and label table do not align on segment index.
class JoinMismatch : public Error {
 public:
  using Error::Error;
};

class SinkClosed : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A verification target missed; the message lists the measured values.
class AssertionFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace roadmon
