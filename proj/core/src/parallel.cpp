#include "qlstat/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <thread>
#include <vector>

namespace qlstat {

unsigned default_thread_count()
{
  if (const char* env = std::getenv("QLSTAT_THREADS")) {
    unsigned value = 0;
    const char* end = env + std::strlen(env);
    const auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec == std::errc() && ptr == end && value > 0)
      return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count,
                  unsigned threads,
                  const std::function<void(std::size_t)>& body)
{
  if (count == 0)
    return;
  const std::size_t workers =
    std::min<std::size_t>(std::max(1u, threads), count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i)
      body(i);
    return;
  }

  struct Failure
  {
    std::size_t index = 0;
    std::exception_ptr error;
  };
  std::vector<Failure> failures(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      for (std::size_t i = begin; i < end; ++i) {
        try {
          body(i);
        } catch (...) {
          failures[w] = { i, std::current_exception() };
          return;
        }
      }
    });
  }
  for (auto& t : pool)
    t.join();
  // chunks are ordered, so the first recorded failure has the smallest index
  for (const auto& f : failures) {
    if (f.error)
      std::rethrow_exception(f.error);
  }
}

} // namespace qlstat
