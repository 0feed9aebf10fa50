#pragma once

#include <cstdint>

namespace danilab {

// Counter-based generator: every draw is a pure function of
// (seed, index, stream), so parallel and serial evaluation agree.
std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0);

// Uniform on [0,1) with 53 random bits.
double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0);

// Standard normal via Box-Muller on two counter draws.
double counter_normal(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0);

}  // namespace danilab
