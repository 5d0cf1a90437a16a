#pragma once

namespace recon {

/// Selects the OpenMP kernel or its single-threaded reference for the heavy
/// loops. Both produce identical results; the serial path exists for testing
/// and for the benchmark.
enum class Exec {
  serial,
  parallel,
};

inline bool run_parallel(Exec e) noexcept { return e == Exec::parallel; }

}  // namespace recon
