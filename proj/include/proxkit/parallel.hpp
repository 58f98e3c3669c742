#pragma once

#include <cstddef>
#include <functional>

namespace proxkit {

/// Runs fn over [0,n) split into at most `workers` contiguous chunks.
/// fn(chunk_index, begin, end). Chunk boundaries depend only on (n, workers),
/// so per-chunk results merged in chunk order are schedule-independent.
void parallel_for_chunks(std::size_t n, int workers,
                         const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace proxkit
