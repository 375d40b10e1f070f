#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace boussinesq {

/// Worker count used by parallel_for. Defaults to $BOUSSINESQ_THREADS, else
/// the hardware concurrency.
int thread_count();
void set_thread_count(int threads);

/// Calls body(i) for i in [0, count). Bodies must write to disjoint outputs;
/// the first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Pairwise (cascade) summation in index order; the result is independent
/// of how the inputs were produced.
double pairwise_sum(std::span<const double> values);

}  // namespace boussinesq
