// Copyright 2026 The WSDC Authors
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

#ifndef WSDC_SERIALIZE_HPP_
#define WSDC_SERIALIZE_HPP_

#include <string>

#include "wsdc/training.hpp"

namespace wsdc {

// Versioned binary model container: magic bytes "WSDC", format version u32,
// then length-prefixed named parameter blocks of little-endian 64-bit
// floats. The first block ("meta") carries the shape/config scalars needed
// to rebuild the model before the parameter blocks are read back.
void save_model(const ModelState& state, const std::string& path);
ModelState load_model(const std::string& path);

constexpr uint32_t kModelFormatVersion = 1;

}  // namespace wsdc

#endif  // WSDC_SERIALIZE_HPP_
