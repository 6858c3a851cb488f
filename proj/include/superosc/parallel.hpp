#pragma once

namespace superosc {

/// Environment variable capping the OpenMP thread count.
inline constexpr const char* kThreadsEnv = "SUPEROSC_THREADS";

/// Apply SUPEROSC_THREADS (if set) to the OpenMP runtime and return the
/// thread count parallel regions will use.
int configure_threads_from_env();

int max_threads();

}  // namespace superosc
