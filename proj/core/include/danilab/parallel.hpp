#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace danilab {

// Calls body(i) for i in [0, count) on up to `threads` worker threads.
// Iterations are split into contiguous chunks; the first exception thrown
// by any iteration is rethrown on the calling thread.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

// Pairwise sum with a tree shape fixed by the length alone, so the result
// does not depend on how the terms were computed.
double pairwise_sum(const std::vector<double>& values);

}  // namespace danilab
