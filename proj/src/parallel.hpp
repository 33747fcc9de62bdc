#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ddsgps::detail {

/// Fixed worker pool for per-agent work. Index i always lands on worker
/// i % threads; each index is written by exactly one worker, so results do
/// not depend on the thread count.
class ParallelFor {
 public:
  explicit ParallelFor(unsigned threads);
  ~ParallelFor();
  ParallelFor(const ParallelFor&) = delete;
  ParallelFor& operator=(const ParallelFor&) = delete;

  unsigned threads() const { return static_cast<unsigned>(workers_.size()) + 1; }

  void run(std::size_t n, const std::function<void(std::size_t)>& body);

 private:
  void worker_loop(unsigned id);
  void run_share(unsigned id);

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable start_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* body_ = nullptr;
  std::size_t n_ = 0;
  std::size_t generation_ = 0;
  std::size_t pending_ = 0;
  bool stopping_ = false;
  std::exception_ptr worker_failure_;
};

}  // namespace ddsgps::detail
