#include "parallel.hpp"

#include <exception>
#include <utility>

namespace ddsgps::detail {

ParallelFor::ParallelFor(unsigned threads) {
  for (unsigned id = 1; id < threads; ++id) workers_.emplace_back([this, id] { worker_loop(id); });
}

ParallelFor::~ParallelFor() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  start_.notify_all();
  for (auto& w : workers_) w.join();
}

void ParallelFor::run_share(unsigned id) {
  const std::size_t stride = threads();
  for (std::size_t i = id; i < n_; i += stride) (*body_)(i);
}

void ParallelFor::run(std::size_t n, const std::function<void(std::size_t)>& body) {
  if (workers_.empty()) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  {
    std::lock_guard lock(mutex_);
    body_ = &body;
    n_ = n;
    pending_ = workers_.size();
    ++generation_;
  }
  start_.notify_all();
  std::exception_ptr failure;
  try {
    run_share(0);
  } catch (...) {
    failure = std::current_exception();
  }
  std::unique_lock lock(mutex_);
  done_.wait(lock, [this] { return pending_ == 0; });
  body_ = nullptr;
  if (!failure) failure = std::exchange(worker_failure_, nullptr);
  worker_failure_ = nullptr;
  if (failure) std::rethrow_exception(failure);
}

void ParallelFor::worker_loop(unsigned id) {
  std::size_t seen = 0;
  for (;;) {
    {
      std::unique_lock lock(mutex_);
      start_.wait(lock, [&] { return stopping_ || generation_ != seen; });
      if (stopping_) return;
      seen = generation_;
    }
    std::exception_ptr failure;
    try {
      run_share(id);
    } catch (...) {
      failure = std::current_exception();
    }
    {
      std::lock_guard lock(mutex_);
      if (failure && !worker_failure_) worker_failure_ = failure;
      --pending_;
    }
    done_.notify_one();
  }
}

}  // namespace ddsgps::detail
