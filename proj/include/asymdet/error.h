/* Copyright 2026 The asymdet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef ASYMDET_ERROR_H_
#define ASYMDET_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace asymdet {

// Stable error categories. The CLI prints these as the diagnostic prefix.
enum class ErrorKind {
  kShape,
  kConfig,
  kIo,
  kParse,
  kValidation,
  kDegenerate,
  kEmptyDataset,
};

std::string_view ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Shape mismatch with the expected and actual extents spelled out.
Error ShapeError(std::string_view what, std::string_view expected,
                 std::string_view actual);

}  // namespace asymdet

#endif  // ASYMDET_ERROR_H_
