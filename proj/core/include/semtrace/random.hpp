#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace semtrace {

using Engine = std::mt19937_64;

/// Derives an independent engine for the named stream under a run seed.
/// Same (seed, name) always yields the same sequence, on every platform.
Engine make_stream(std::uint64_t seed, std::string_view name);

/// Uniform integer in [0, n). Portable: does not depend on the
/// standard library's distribution implementation.
std::size_t uniform_index(Engine& engine, std::size_t n);

/// Uniform real in [0, 1) with 53 random bits.
double uniform_unit(Engine& engine);

}  // namespace semtrace
