#include "harness/parallel.hpp"

#include <atomic>

namespace harness {

namespace {
std::atomic<int> g_workers{1};
}

int default_workers() noexcept { return g_workers.load(); }

void set_default_workers(int workers) noexcept { g_workers.store(std::max(1, workers)); }

}  // namespace harness
