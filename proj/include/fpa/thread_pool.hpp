#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fpa {

/// Fixed-size fork-join pool. `parallel_for` splits [0, n) into contiguous
/// chunks, runs them on the workers plus the calling thread, and rethrows the
/// first exception after all chunks have joined.
class ThreadPool {
public:
    explicit ThreadPool(std::size_t workers = 1);
    ~ThreadPool();

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    std::size_t size() const noexcept { return threads_.size() + 1; }

    void parallel_for(std::size_t n, const std::function<void(std::size_t begin, std::size_t end)>& body);

private:
    void worker_loop(std::size_t id);

    std::vector<std::thread> threads_;
    std::mutex mu_;
    std::condition_variable cv_work_;
    std::condition_variable cv_done_;
    const std::function<void(std::size_t, std::size_t)>* body_ = nullptr;
    std::size_t n_ = 0;
    std::size_t generation_ = 0;
    std::size_t pending_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
};

}  // namespace fpa
