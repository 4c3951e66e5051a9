#pragma once

#include <cstddef>

namespace mvsdde {

/// Number of worker threads used by the parallel loops. Results never depend
/// on this value: every loop writes disjoint, index-addressed outputs.
void set_num_threads(int threads);
int num_threads();

namespace detail {
template <typename F>
void parallel_for(std::size_t count, F&& body);
}  // namespace detail

}  // namespace mvsdde

#include "mvsdde/parallel_impl.hpp"
