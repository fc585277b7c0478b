// Copyright 2026 The liftdep authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace liftdep {

/// Base class of every recoverable error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A table (or a restriction of it) has no complete case to count.
class EmptySupport : public Error {
 public:
  using Error::Error;
};

/// Conditioning on an event of probability zero.
class ZeroConditioningEvent : public Error {
 public:
  using Error::Error;
};

/// A probability vector is negative somewhere or does not sum to one.
class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

/// A window with P(X in W) = 0.
class ZeroProbabilityWindow : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

/// Too few rows to estimate (e.g. a group with fewer than two complete rows).
class InsufficientData : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// The support restriction eliminated every profile.
class NoFeasibleProfile : public Error {
 public:
  using Error::Error;
};

/// A data row that cannot be parsed; the message carries the line number.
class MalformedRow : public Error {
 public:
  using Error::Error;
};

class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace liftdep
