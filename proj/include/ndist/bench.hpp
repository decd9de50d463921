#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ndist/nested.hpp"

namespace ndist {

struct BenchConfig {
    std::vector<int> depths;
    int runs = 10;
    int max_children = 3;
    int value_dim = 1;
    double r = 2.0;
    double gamma_divisor = 30.0;
    std::uint64_t seed = 0;
    double increment_scale = 1.0;
    std::string output;  // summary CSV path; raw per-pair rows go to <output>.raw.csv

    // Sinkhorn settings for the END timings. Plain mode is safe here: the
    // gamma heuristic keeps exponents near -gamma_divisor.
    double sinkhorn_tol = 1e-6;
    int sinkhorn_max_iter = 10000;
    bool sinkhorn_log_domain = false;

    // Each pair's ND and END solves are timed timing_reps times and the
    // minimum is reported, to damp scheduler jitter on sub-millisecond
    // problems. The computed values are identical across repeats.
    int timing_reps = 3;

    int threads = 1;
};

struct BenchRow {
    int depth = 0;
    double mean_time_nd_ms = 0.0;
    double mean_time_end_ms = 0.0;
    double speedup = 0.0;             // mean_time_nd / mean_time_end
    double relative_error_pct = 0.0;  // mean of 100 * (END - ND) / END
};

struct BenchPair {
    int depth = 0;
    int run = 0;
    double time_nd_ms = 0.0;
    double time_end_ms = 0.0;
    double nd = 0.0;
    double end_value = 0.0;
    double relative_error_pct = 0.0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::vector<BenchPair> pairs;
    std::vector<std::string> warnings;  // failed pairs, excluded from means
};

// Runs the generate/ND/END timing protocol; writes the CSVs when
// cfg.output is set. The tree sequence is deterministic given cfg.seed.
BenchReport run_bench(const BenchConfig& cfg);

void write_bench_csv(const BenchReport& report, const std::string& path);

// Parses a summary CSV produced by write_bench_csv (comment lines ignored).
std::vector<BenchRow> read_bench_csv(const std::string& path);

}  // namespace ndist
