#include <benchmark/benchmark.h>

// The distro benchmark_main archive is LTO bytecode tied to one compiler
// release, so the entry point is built here.
BENCHMARK_MAIN();
