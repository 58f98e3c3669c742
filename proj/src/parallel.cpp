#include "proxkit/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace proxkit {

void parallel_for_chunks(std::size_t n, int workers,
                         const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t want = workers <= 1 ? 1 : static_cast<std::size_t>(workers);
  const std::size_t chunks = std::min(want, n);
  if (chunks == 1) {
    fn(0, 0, n);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(chunks);
  const std::size_t base = n / chunks;
  const std::size_t rem = n % chunks;
  std::size_t begin = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t len = base + (c < rem ? 1 : 0);
    const std::size_t end = begin + len;
    threads.emplace_back([&fn, c, begin, end] { fn(c, begin, end); });
    begin = end;
  }
  for (auto& t : threads) t.join();
}

}  // namespace proxkit
