#include <fpa/thread_pool.hpp>

#include <algorithm>

namespace fpa {

namespace {

std::pair<std::size_t, std::size_t> chunk(std::size_t n, std::size_t parts, std::size_t id)
{
    const std::size_t base = n / parts;
    const std::size_t rem = n % parts;
    const std::size_t begin = id * base + std::min(id, rem);
    return {begin, begin + base + (id < rem ? 1 : 0)};
}

}  // namespace

ThreadPool::ThreadPool(std::size_t workers)
{
    const std::size_t extra = workers > 1 ? workers - 1 : 0;
    threads_.reserve(extra);
    for (std::size_t id = 1; id <= extra; ++id) threads_.emplace_back([this, id] { worker_loop(id); });
}

ThreadPool::~ThreadPool()
{
    {
        std::lock_guard lock(mu_);
        stop_ = true;
    }
    cv_work_.notify_all();
    for (auto& t : threads_) t.join();
}

void ThreadPool::worker_loop(std::size_t id)
{
    std::size_t seen = 0;
    for (;;) {
        const std::function<void(std::size_t, std::size_t)>* body = nullptr;
        std::size_t n = 0;
        {
            std::unique_lock lock(mu_);
            cv_work_.wait(lock, [&] { return stop_ || generation_ != seen; });
            if (stop_) return;
            seen = generation_;
            body = body_;
            n = n_;
        }
        const auto [begin, end] = chunk(n, size(), id);
        try {
            if (begin < end) (*body)(begin, end);
        } catch (...) {
            std::lock_guard lock(mu_);
            if (!error_) error_ = std::current_exception();
        }
        {
            std::lock_guard lock(mu_);
            if (--pending_ == 0) cv_done_.notify_one();
        }
    }
}

void ThreadPool::parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body)
{
    if (threads_.empty() || n < 2) {
        if (n > 0) body(0, n);
        return;
    }
    {
        std::lock_guard lock(mu_);
        body_ = &body;
        n_ = n;
        pending_ = threads_.size();
        error_ = nullptr;
        ++generation_;
    }
    cv_work_.notify_all();

    std::exception_ptr own;
    const auto [begin, end] = chunk(n, size(), 0);
    try {
        if (begin < end) body(begin, end);
    } catch (...) {
        own = std::current_exception();
    }

    std::unique_lock lock(mu_);
    cv_done_.wait(lock, [&] { return pending_ == 0; });
    body_ = nullptr;
    if (own) std::rethrow_exception(own);
    if (error_) std::rethrow_exception(error_);
}

}  // namespace fpa
