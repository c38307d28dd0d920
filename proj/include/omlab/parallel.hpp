#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace omlab {

using Rng = std::mt19937_64;

/// Independent generator for a (seed, stream) pair; streams are the unit of
/// reproducibility, so results never depend on how streams map to threads.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

/// 0 means "all hardware threads".
int resolve_threads(int requested);

/// Runs body(i) for i in [0, n) on up to `threads` workers. The first exception
/// thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace omlab
