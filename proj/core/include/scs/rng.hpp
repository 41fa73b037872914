// Copyright 2026 The SCS Authors
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

#include <cstdint>
#include <random>
#include <string_view>

namespace scs {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// 64-bit FNV-1a.
std::uint64_t hash_bytes(std::string_view bytes) noexcept;

/// Seed for a named substream ("init", "shuffle", "kmeans", "synth", ...)
/// of a run-wide seed. Distinct names give decorrelated streams.
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream) noexcept;

}  // namespace scs
