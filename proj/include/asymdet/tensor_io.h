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

#ifndef ASYMDET_TENSOR_IO_H_
#define ASYMDET_TENSOR_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "asymdet/tensor.h"

namespace asymdet {

// Fixture container: "ASYT", u32 version, u32 channels, u32 height,
// u32 width, then channels*height*width float32 values. Little-endian.
inline constexpr std::uint32_t kTensorFormatVersion = 1;

// Values are narrowed to float32 on write.
std::vector<std::uint8_t> EncodeTensor(const Tensor& t);
Tensor DecodeTensor(std::span<const std::uint8_t> bytes);

void SaveTensor(const std::filesystem::path& path, const Tensor& t);
Tensor LoadTensor(const std::filesystem::path& path);

}  // namespace asymdet

#endif  // ASYMDET_TENSOR_IO_H_
