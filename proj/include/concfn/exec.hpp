#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace concfn {

// Execution mode for the data-parallel kernels (Monte Carlo sampling,
// candidate-generator scans, sweep cells, trial batteries). Both paths
// produce bit-identical results: work is split into fixed-size chunks with
// seeds derived from the master seed, partial results land in preassigned
// slots, and reductions run serially in index order afterwards.
enum class ExecMode { serial, openmp };

// Default mode: openmp unless CONCFN_EXEC=serial. Thread count honours
// CONCFN_THREADS when set.
ExecMode default_exec_mode();
int configured_thread_count();

// Runs fn(i) for i in [0, count). In openmp mode iterations are distributed
// across threads; fn must only write to its own slot.
void parallel_for(std::size_t count, ExecMode mode, const std::function<void(std::size_t)>& fn);

}  // namespace concfn
