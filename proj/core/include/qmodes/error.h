// Copyright 2026 The qmodes Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QMODES_ERROR_H_
#define QMODES_ERROR_H_

#include <stdexcept>
#include <string>

namespace qmodes {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A parameter outside its legal range, or an ill-formed request.
class InvalidArgument : public Error {
   public:
    using Error::Error;
};

/// A mode label or port that the registry does not know about.
class UnknownLabel : public Error {
   public:
    using Error::Error;
};

/// An iterative fit that did not reach its stopping criterion.
class FitFailure : public Error {
   public:
    using Error::Error;
};

/// Experiment file syntax or semantic error, tagged with a 1-based line.
class ParseError : public Error {
   public:
    ParseError(int line, const std::string &what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

   private:
    int line_;
};

}  // namespace qmodes

#endif  // QMODES_ERROR_H_
