#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace whitneydim {

/// Cell/node budget. Read once from WHITNEYDIM_MAX_CELLS (default 2^26).
std::uint64_t max_cells();
/// Overrides the budget for the current process (0 restores the env/default value).
void set_max_cells(std::uint64_t cap);

/// Worker count used by parallel_for (default 1).
unsigned thread_count();
void set_thread_count(unsigned n);

/// Runs body(i) for i in [0, n) on up to thread_count() threads. Tasks write
/// only to their own slots, so results never depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace whitneydim
