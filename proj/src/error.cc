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

#include "asymdet/error.h"

namespace asymdet {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kShape:
      return "shape";
    case ErrorKind::kConfig:
      return "config";
    case ErrorKind::kIo:
      return "io";
    case ErrorKind::kParse:
      return "parse";
    case ErrorKind::kValidation:
      return "validation";
    case ErrorKind::kDegenerate:
      return "degenerate";
    case ErrorKind::kEmptyDataset:
      return "empty-dataset";
  }
  return "unknown";
}

Error ShapeError(std::string_view what, std::string_view expected,
                 std::string_view actual) {
  std::string msg(what);
  msg += ": expected ";
  msg += expected;
  msg += ", got ";
  msg += actual;
  return Error(ErrorKind::kShape, msg);
}

}  // namespace asymdet
