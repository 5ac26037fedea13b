// Copyright (C) 2026 the skincal authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace skincal {

/// Base class for all domain errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// geometry
class DegenerateLayout : public Error {
 public:
  using Error::Error;
};
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

// acquisition / fitting
class SourceStalled : public Error {
 public:
  using Error::Error;
};
class PressureNotReached : public Error {
 public:
  using Error::Error;
};
class EmptyLog : public Error {
 public:
  using Error::Error;
};
class InsufficientLevels : public Error {
 public:
  using Error::Error;
};
class SingularSystem : public Error {
 public:
  using Error::Error;
};

// force reconstruction
class GeometryMismatch : public Error {
 public:
  using Error::Error;
};
class ZeroTruth : public Error {
 public:
  using Error::Error;
};

// wire protocols
class ModuleIdRange : public Error {
 public:
  using Error::Error;
};
class SeqMismatch : public Error {
 public:
  using Error::Error;
};
class IndexOrder : public Error {
 public:
  using Error::Error;
};
class IdMismatch : public Error {
 public:
  using Error::Error;
};
class Malformed : public Error {
 public:
  using Error::Error;
};
class RangeExceeded : public Error {
 public:
  using Error::Error;
};

/// Filesystem-level failure (missing file, unwritable path). Distinct from
/// domain errors so the CLI can map it to its own exit code.
class IoError : public Error {
 public:
  using Error::Error;
};

/// File parsing error carrying the 1-based line number of the offending row.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line)
      : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace skincal
