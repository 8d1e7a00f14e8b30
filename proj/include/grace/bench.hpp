#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "grace/optimizer.hpp"
#include "grace/scene.hpp"

namespace grace {

/// Per-(method, seed) benchmark measurements. Utilities across methods with
/// different hierarchy sizes live on different scales; compare within a
/// method, or use the collision-free fraction.
struct BenchmarkEntry {
    std::string method;
    std::uint64_t seed = 0;
    double top10_mean_utility = 0.0;
    double top1_utility = 0.0;
    std::vector<double> top1_rule_probs;
    double top10_collision_free_frac = 0.0; ///< share of top-10 with p(collision-free) > 0.5
    std::int64_t evaluations = 0;
    std::optional<double> wall_seconds;
};

struct MethodSummary {
    std::string method;
    double mean_top10_utility = 0.0;
    double std_top10_utility = 0.0;
    double mean_collision_free_frac = 0.0;
};

struct BenchmarkReport {
    std::string scene_name;
    std::vector<BenchmarkEntry> entries;

    std::vector<MethodSummary> summaries() const;
    std::vector<const BenchmarkEntry*> method_entries(const std::string& method) const;
};

struct BenchOptions {
    int seeds = 20;
    int grace_samples = 50;
    std::vector<int> filter_sizes = {10, 50, 100, 1000};
    OptimizerConfig grace_config;      ///< batch/selection sizes are overwritten
    bool with_ablations = true;        ///< S, SE, SC, SEC, SECN ladder
    bool measure_time = false;         ///< adds wall_seconds to entries
};

/// Ablation hierarchy for a code like "SEC" (S, E, C, N letters; E and C
/// share priority 2 when both present, matching the standard ranking).
RuleHierarchy ablation_hierarchy(const std::string& code);

/// One method run: grace, filter-N, or ablation-CODE on the given scene.
BenchmarkEntry run_method(const std::string& method, const Scene& scene, std::uint64_t seed,
                          const BenchOptions& options);

/// Full comparison: grace and filter baselines plus the ablation ladder,
/// each over `seeds` seeds (1..S). Entry order is fixed by (method, seed).
BenchmarkReport run_benchmark(const Scene& scene, const BenchOptions& options);

/// report.csv: one row per (method, seed). Parses back losslessly.
void save_benchmark_report(const BenchmarkReport& report, const std::filesystem::path& path);
BenchmarkReport load_benchmark_report(const std::filesystem::path& path);

/// Plot-ready long format (method, seed, metric, value) with aggregate rows
/// (seed column "mean"/"std") appended.
void save_benchmark_long(const BenchmarkReport& report, const std::filesystem::path& path);

} // namespace grace
