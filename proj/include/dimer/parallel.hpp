#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace dimer {

/// Worker count used when the caller passes 0.
unsigned default_thread_count();

/// Calls body(i) for every i in [0, count) on up to `threads` workers.
/// Indices are handed out in fixed-size blocks; body must write its result
/// into a slot owned by i. If any call throws, the exception from the lowest
/// failing index is rethrown after all workers stop.
void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t)>& body);

}  // namespace dimer
