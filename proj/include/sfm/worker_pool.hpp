#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sfm {

/// Fixed set of persistent workers executing static range partitions.
///
/// parallel_for splits [0, n) into `size()` contiguous chunks; chunk k always
/// goes to the same slot, so any per-index computation is independent of
/// scheduling. The calling thread runs chunk 0.
class WorkerPool {
public:
  explicit WorkerPool(std::size_t workers);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const { return threads_.size() + 1; }

  /// Runs fn(begin, end) over the partition and blocks until all chunks finish.
  /// An exception thrown by any chunk is rethrown here (the lowest chunk wins).
  void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

private:
  void worker_loop(std::size_t slot);

  std::vector<std::jthread> threads_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t, std::size_t)>* job_ = nullptr;
  std::size_t job_n_ = 0;
  std::size_t generation_ = 0;
  std::size_t pending_ = 0;
  bool stopping_ = false;
  std::vector<std::exception_ptr> errors_;
};

/// Runs task(i) for i in [0, n) on up to `workers` threads, each pulling the
/// next unclaimed index. Rethrows the first (lowest-index) failure.
void run_indexed(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& task);

}  // namespace sfm
