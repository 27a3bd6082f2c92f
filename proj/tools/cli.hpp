#pragma once

namespace semtrace::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Entry point for the `semtrace` executable. Subcommands: ingest-check,
/// wsd-eval, cluster, purity, cohesion, lsc, isotropy.
int run(int argc, const char* const* argv);

}  // namespace semtrace::cli
