#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>

namespace ebcr {

using RngStream = std::mt19937_64;

/// Independent stream keyed by an arbitrary tuple of integers, e.g.
/// (seed, replication, population). Equal keys give bit-identical streams.
RngStream make_stream(std::initializer_list<std::uint64_t> key);

/// Worker count: `requested` if positive, else the hardware concurrency,
/// in either case capped by EBCR_THREADS when that is set to a positive value.
unsigned resolve_threads(int requested);

/// Run body(i) for i in [0, n_jobs) on up to `threads` workers. Jobs are
/// independent; callers write into per-job slots and reduce in index order,
/// so results never depend on the worker count. The first exception thrown
/// by any job is rethrown after all workers have joined.
void parallel_for(std::size_t n_jobs, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace ebcr
