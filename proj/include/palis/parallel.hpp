#pragma once

#include <cstddef>
#include <functional>

namespace palis {

/// Caps the worker count used by parallel_for (0 restores the hardware
/// default). Process-wide; set once at startup.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Runs body(i) for i in [0, n). Iterations must write disjoint state;
/// callers reduce per-index results in index order for determinism.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace palis
