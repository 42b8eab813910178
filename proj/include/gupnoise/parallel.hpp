#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace gupnoise {

namespace detail {
inline thread_local bool serial_only = false;
}

// Worker count: GUPNOISE_THREADS if set to a positive integer, otherwise the
// hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("GUPNOISE_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Forces parallel_for calls on this thread to run serially while alive.
class ScopedSerial {
 public:
  ScopedSerial() : previous_(detail::serial_only) { detail::serial_only = true; }
  ~ScopedSerial() { detail::serial_only = previous_; }
  ScopedSerial(const ScopedSerial&) = delete;
  ScopedSerial& operator=(const ScopedSerial&) = delete;

 private:
  bool previous_;
};

// Runs body(i) for i in [0, n) over contiguous index blocks. Each index is
// handled by exactly one worker, so results written to slot i are
// independent of the thread count. The exception from the lowest failing
// index is rethrown.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = detail::serial_only ? 1 : std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t begin, std::size_t end) {
    ScopedSerial serial;
    for (std::size_t i = begin; i < end; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk, end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back(run, begin, end);
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace gupnoise
