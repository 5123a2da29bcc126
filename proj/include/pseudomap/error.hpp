// Copyright 2026 The PseudoMap Authors
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

#ifndef PSEUDOMAP__ERROR_HPP_
#define PSEUDOMAP__ERROR_HPP_

#include <stdexcept>
#include <string>

namespace pseudomap
{

enum class ErrorCode
{
  kValidation,
  kDegenerateGeometry,
  kInsufficientPredictions,
  kBudgetExceeded,
  kIo,
};

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string & what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string & what) { throw Error(code, what); }

inline void require(bool cond, const std::string & what)
{
  if (!cond) {
    fail(ErrorCode::kValidation, what);
  }
}

}  // namespace pseudomap

#endif  // PSEUDOMAP__ERROR_HPP_
