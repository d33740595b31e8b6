#ifndef RDOT_PARALLEL_HPP
#define RDOT_PARALLEL_HPP

namespace rdot::par {

/// Worker count for OpenMP regions: explicit override if set, otherwise the
/// RDOT_THREADS environment variable, otherwise the OpenMP default.
///
/// Every parallel loop in this project is a pure per-item map; reductions
/// are folded serially afterwards in index order, so results are identical
/// for any thread count.
int thread_count();

/// Override the worker count (0 restores env/default resolution). Used by
/// tests and benchmarks; the CLI relies on RDOT_THREADS.
void set_thread_count(int n);

}  // namespace rdot::par

#endif  // RDOT_PARALLEL_HPP
