#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace lrme {

using Rng = std::mt19937_64;

// splitmix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

// Sub-seed for one named random component. Changing the parameters of one
// component never perturbs the stream of another.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

// Sub-seed from a sequence of integer keys, e.g. (base_seed, n, probe, trial).
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

}  // namespace lrme
