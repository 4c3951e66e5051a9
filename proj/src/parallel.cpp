#include "mvsdde/parallel.hpp"

#include <algorithm>
#include <atomic>

namespace mvsdde {
namespace {
std::atomic<int> g_threads{1};
}

void set_num_threads(int threads) { g_threads = std::max(1, threads); }

int num_threads() { return g_threads; }

}  // namespace mvsdde
