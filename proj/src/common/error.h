// Copyright 2026 The retmem Authors.
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

#ifndef RETMEM_COMMON_ERROR_H_
#define RETMEM_COMMON_ERROR_H_

#include <sstream>
#include <stdexcept>
#include <string>

namespace retmem {

// Every failure inside the library is one of these. The C API maps each
// subclass onto a distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class MissingArtifact : public Error {
 public:
  using Error::Error;
};

}  // namespace retmem

#define RETMEM_THROW(type, msg)        \
  do {                                 \
    std::ostringstream retmem_oss_;    \
    retmem_oss_ << msg;                \
    throw type(retmem_oss_.str());     \
  } while (0)

#endif  // RETMEM_COMMON_ERROR_H_
