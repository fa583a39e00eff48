#pragma once

#include "rng.hpp"

namespace coarsening {

template <class T, class F>
std::vector<T> replicate(std::size_t count, std::uint64_t master_seed, unsigned threads, F&& replica) {
  std::vector<T> out(count);
  parallel_for(count, threads, [&](std::size_t i) { out[i] = replica(i, derive_seed(master_seed, i)); });
  return out;
}

}  // namespace coarsening
