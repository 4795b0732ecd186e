// Copyright 2026 The SplitMix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPLITMIX_ERROR_H_
#define SPLITMIX_ERROR_H_

#include <stdexcept>
#include <string>

namespace splitmix {

// Error categories. The numeric values are mirrored by the C API status codes.
enum class ErrorCode {
  kParameter = 1,
  kShape = 2,
  kProtocol = 3,
  kState = 4,
  kConfig = 5,
  kIo = 6,
  kInternal = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void ThrowParameter(const std::string& message) {
  throw Error(ErrorCode::kParameter, message);
}
[[noreturn]] inline void ThrowShape(const std::string& message) {
  throw Error(ErrorCode::kShape, message);
}
[[noreturn]] inline void ThrowProtocol(const std::string& message) {
  throw Error(ErrorCode::kProtocol, message);
}
[[noreturn]] inline void ThrowState(const std::string& message) {
  throw Error(ErrorCode::kState, message);
}
[[noreturn]] inline void ThrowConfig(const std::string& message) {
  throw Error(ErrorCode::kConfig, message);
}
[[noreturn]] inline void ThrowIo(const std::string& message) {
  throw Error(ErrorCode::kIo, message);
}
[[noreturn]] inline void ThrowInternal(const std::string& message) {
  throw Error(ErrorCode::kInternal, message);
}

}  // namespace splitmix

#endif  // SPLITMIX_ERROR_H_
