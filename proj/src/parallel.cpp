#include "wgeit/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wgeit {

namespace {
std::atomic<int> g_threads{0};
}

void set_num_threads(int n) { g_threads = n < 0 ? 0 : n; }

int num_threads()
{
#ifdef _OPENMP
    const int n = g_threads.load();
    return n > 0 ? n : omp_get_max_threads();
#else
    return 1;
#endif
}

void parallel_for(int n, const std::function<void(int)>& fn)
{
    std::exception_ptr error;
    std::mutex error_mutex;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(num_threads())
#endif
    for (int i = 0; i < n; ++i) {
        try {
            fn(i);
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error)
                error = std::current_exception();
        }
    }
    if (error)
        std::rethrow_exception(error);
}

} // namespace wgeit
