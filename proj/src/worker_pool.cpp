#include "sfm/worker_pool.hpp"

#include <algorithm>
#include <atomic>
#include <exception>

namespace sfm {

namespace {

std::pair<std::size_t, std::size_t> chunk(std::size_t n, std::size_t parts, std::size_t k) {
  const std::size_t base = n / parts;
  const std::size_t extra = n % parts;
  const std::size_t begin = k * base + std::min(k, extra);
  return {begin, begin + base + (k < extra ? 1 : 0)};
}

}  // namespace

WorkerPool::WorkerPool(std::size_t workers) {
  const std::size_t extra = workers > 1 ? workers - 1 : 0;
  errors_.resize(extra + 1);
  threads_.reserve(extra);
  for (std::size_t slot = 1; slot <= extra; ++slot)
    threads_.emplace_back([this, slot] { worker_loop(slot); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  start_cv_.notify_all();
}

void WorkerPool::worker_loop(std::size_t slot) {
  std::size_t seen = 0;
  for (;;) {
    const std::function<void(std::size_t, std::size_t)>* job;
    std::size_t n;
    {
      std::unique_lock lock(mutex_);
      start_cv_.wait(lock, [&] { return stopping_ || generation_ != seen; });
      if (stopping_) return;
      seen = generation_;
      job = job_;
      n = job_n_;
    }
    const auto [begin, end] = chunk(n, size(), slot);
    try {
      if (begin < end) (*job)(begin, end);
    } catch (...) {
      errors_[slot] = std::current_exception();
    }
    {
      std::lock_guard lock(mutex_);
      if (--pending_ == 0) done_cv_.notify_one();
    }
  }
}

void WorkerPool::parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  if (threads_.empty()) {
    if (n > 0) fn(0, n);
    return;
  }
  std::fill(errors_.begin(), errors_.end(), nullptr);
  {
    std::lock_guard lock(mutex_);
    job_ = &fn;
    job_n_ = n;
    pending_ = threads_.size();
    ++generation_;
  }
  start_cv_.notify_all();
  const auto [begin, end] = chunk(n, size(), 0);
  try {
    if (begin < end) fn(begin, end);
  } catch (...) {
    errors_[0] = std::current_exception();
  }
  {
    std::unique_lock lock(mutex_);
    done_cv_.wait(lock, [&] { return pending_ == 0; });
  }
  for (const auto& e : errors_)
    if (e) std::rethrow_exception(e);
}

void run_indexed(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> threads;
    const std::size_t count = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    for (std::size_t t = 1; t < count; ++t) threads.emplace_back(body);
    body();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace sfm
