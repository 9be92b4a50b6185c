#pragma once

#include <cstddef>
#include <functional>

namespace eigenwave {

/// Runs body(begin, end) over contiguous chunks of [0, count) on at most
/// `threads` workers. Chunk boundaries depend only on count and threads.
void parallel_chunks(std::size_t count, int threads, const std::function<void(std::size_t, std::size_t)>& body);

} // namespace eigenwave
