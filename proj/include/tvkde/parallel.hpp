#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace tvkde {

//! Runs body(i) for i in [0, n) on up to hardware_concurrency threads in
//! contiguous blocks. Results must be written to per-index slots so the
//! outcome does not depend on scheduling. The first exception is rethrown.
template <typename Body>
void
parallel_for(long n, Body&& body)
{
  const long workers =
    std::min<long>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (long i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  {
    std::vector<std::jthread> pool;
    for (long w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (long i = w * n / workers; i < (w + 1) * n / workers; ++i)
            body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

} // namespace tvkde
