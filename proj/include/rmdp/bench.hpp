#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rmdp/mdp.hpp"
#include "rmdp/robust_bellman.hpp"

namespace rmdp {

/**
 * Random model: each kernel row is a uniform draw from the simplex,
 * rewards are uniform on [0,1] and mu is uniform.
 */
Mdp random_mdp(std::size_t S, std::size_t A, double gamma, std::mt19937_64& rng);

/// Uniform radii alpha = beta = 0.1 / S.
UncertaintySpec bench_uncertainty(Rect rect, NormParam p, std::size_t S, std::size_t A);

struct BenchConfig {
    std::vector<std::pair<std::size_t, std::size_t>> sizes;
    std::vector<NormParam> ps;
    std::vector<Rect> rects;
    std::size_t trials = 1;
    std::uint64_t seed = 42;
    double gamma = 0.9;
    double eps = 1e-6;
    /// each timing repeats the solve until both limits are reached
    double min_timing_seconds = 0.05;
    std::size_t min_repeats = 3;
};

struct BenchRecord {
    std::size_t S = 0;
    std::size_t A = 0;
    std::string p;
    std::string rect;
    std::size_t sweeps = 0;
    double wall_time_seconds = 0.0;
    double time_per_sweep = 0.0;
    double kappa_time_fraction = 0.0;
};

/// Per-sweep time of a robust configuration over the nominal one, same instance.
struct BenchRatio {
    std::size_t S = 0;
    std::size_t A = 0;
    std::string p;
    std::string rect;
    std::size_t trial = 0;
    double ratio = 0.0;
};

struct BenchRun {
    std::vector<BenchRecord> records;
    std::vector<BenchRatio> ratios;
};

/**
 * For every size and trial draws one instance (seed + trial index) and
 * times solve on it for every (rect, p) configuration. rect none is
 * timed once per instance regardless of p and serves as the baseline.
 */
BenchRun run_bench(const BenchConfig& cfg);

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records);
void write_ratio_csv(std::ostream& out, const std::vector<BenchRatio>& ratios);

} // namespace rmdp
