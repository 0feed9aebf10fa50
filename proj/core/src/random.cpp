#include "danilab/random.hpp"

#include <cmath>
#include <numbers>

namespace danilab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(seed) ^ index) ^ (stream * 0xd1b54a32d192ed03ULL));
}

double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  return static_cast<double>(counter_bits(seed, index, stream) >> 11) * 0x1.0p-53;
}

double counter_normal(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  const double u1 = 1.0 - counter_uniform(seed, index, 2 * stream);
  const double u2 = counter_uniform(seed, index, 2 * stream + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace danilab
