// Copyright 2026 The lortomo Authors
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

namespace lortomo {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition or invariant violation on a value passed in.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A density matrix too close to pure to be boosted to its rest frame.
class PureStateError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Malformed or invariant-violating input file.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Protocol does not span enough of operator space for the requested rank.
class CompletenessError : public Error {
 public:
  using Error::Error;
};

// An analysis was asked to summarize zero samples.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace lortomo
