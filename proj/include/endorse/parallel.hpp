#pragma once

#include <cstddef>
#include <functional>

namespace endorse {

/// Worker count: hardware concurrency, capped by ENDORSE_DYN_THREADS when set.
int thread_budget();

/// Runs fn(0..count-1) on up to thread_budget() threads. The first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace endorse
