#pragma once

#include <cstddef>
#include <functional>

namespace vibrofdd {

// Thread budget: VIBRO_FDD_THREADS caps it, hardware concurrency is the
// default, and the floor is 1.
std::size_t max_threads();

// Static index partitioning across threads. Each body call writes only to
// its own output slot, so results are bit-identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace vibrofdd
