#include "concfn/exec.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace concfn {

ExecMode default_exec_mode() {
    if (const char* env = std::getenv("CONCFN_EXEC")) {
        if (std::string(env) == "serial") return ExecMode::serial;
    }
#ifdef _OPENMP
    return ExecMode::openmp;
#else
    return ExecMode::serial;
#endif
}

int configured_thread_count() {
    if (const char* env = std::getenv("CONCFN_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void parallel_for(std::size_t count, ExecMode mode, const std::function<void(std::size_t)>& fn) {
#ifdef _OPENMP
    if (mode == ExecMode::openmp) {
        const int threads = configured_thread_count();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i)
            fn(static_cast<std::size_t>(i));
        return;
    }
#else
    (void)mode;
#endif
    for (std::size_t i = 0; i < count; ++i) fn(i);
}

}  // namespace concfn
