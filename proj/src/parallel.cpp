#include "liouville/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace liouville {

namespace {

std::size_t default_workers() {
    if (const char* env = std::getenv("LIOUVILLE_FORGE_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<std::size_t>& cap() {
    static std::atomic<std::size_t> value{default_workers()};
    return value;
}

}  // namespace

std::size_t worker_count() { return cap().load(); }

void set_worker_count(std::size_t workers) { cap().store(workers == 0 ? default_workers() : workers); }

}  // namespace liouville
