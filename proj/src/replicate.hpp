#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace coarsening {

/// Worker count used when the caller passes 0.
unsigned default_threads();

/// Calls body(i) for i in [0, count) on up to `threads` workers. Work is
/// handed out in chunks from a shared counter; the first exception thrown by
/// any call is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

/// Runs `replica(i, seed_i)` for every replica, seed_i = derive_seed(master, i),
/// and returns the outputs in index order.
template <class T, class F>
std::vector<T> replicate(std::size_t count, std::uint64_t master_seed, unsigned threads, F&& replica);

}  // namespace coarsening

#include "replicate_impl.hpp"
