#include "parallel.hpp"

#include <cstdlib>
#include <string>

namespace bed::detail {

std::size_t worker_count() {
    static const std::size_t cached = [] {
        const char* env = std::getenv("BED_THREADS");
        if (env == nullptr || *env == '\0') return std::size_t{1};
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end == env) return std::size_t{1};
        if (v == 0) return std::max<std::size_t>(1, std::thread::hardware_concurrency());
        return static_cast<std::size_t>(v);
    }();
    return cached;
}

}  // namespace bed::detail
