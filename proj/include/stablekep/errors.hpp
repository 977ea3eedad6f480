// Copyright 2026 The StableKEP Authors
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

#ifndef STABLEKEP_ERRORS_HPP_
#define STABLEKEP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace stablekep {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (instance files, LP files, solution files).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that breaks a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Arguments outside an operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ArithmeticOverflow : public Error {
 public:
  using Error::Error;
};

// The internal solver cannot handle the model's variable structure.
class UnsupportedStructure : public Error {
 public:
  using Error::Error;
};

// An externally produced solution does not satisfy the model.
class SolverDisagreement : public Error {
 public:
  using Error::Error;
};

// Brute-force enumeration refused because the input is too large.
class GuardExceeded : public Error {
 public:
  using Error::Error;
};

// A solver solution that does not decode into an exchange.
class DecodeError : public Error {
 public:
  using Error::Error;
};

}  // namespace stablekep

#endif  // STABLEKEP_ERRORS_HPP_
