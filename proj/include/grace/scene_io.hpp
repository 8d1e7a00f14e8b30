#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "grace/optimizer.hpp"
#include "grace/scene.hpp"

namespace grace {

/// Parses an ASCII PLY file (vertex element with x,y,z and optional
/// nx,ny,nz). Malformed content raises IoError with the offending line.
PointCloud load_ply(const std::filesystem::path& path);
void save_ply(const PointCloud& cloud, const std::filesystem::path& path);

/// Whitespace-delimited "x y z [nx ny nz]" rows; '#' comments allowed.
PointCloud load_xyz(const std::filesystem::path& path);

/// Dispatches on extension (.ply / .xyz).
PointCloud load_cloud(const std::filesystem::path& path);

/// Reads a "grace-scene/1" document. Cloud file references are resolved
/// relative to the scene file. The scene is validated against the standard
/// evaluator registry before returning.
Scene load_scene(const std::filesystem::path& path);

/// Writes scene.json plus referenced cloud files into `dir`.
void save_scene(const Scene& scene, const std::filesystem::path& dir);

/// Ranked grasps plus enough context to reproduce the run.
struct ResultRecord {
    std::string scene_name;
    std::uint64_t seed = 0;
    nlohmann::json config;                            ///< echo of the run configuration
    std::vector<std::vector<std::string>> hierarchy;  ///< criterion ids per rule
    std::vector<GraspRow> grasps;                     ///< sorted by expected utility
    std::optional<double> wall_seconds;               ///< only written when requested

    static ResultRecord from_batch(const Scene& scene, const RuleHierarchy& hierarchy,
                                   const GraspBatch& batch, nlohmann::json config);
};

/// Writes the record as "grace-result/1" JSON plus a flat CSV twin next to
/// it (same stem, .csv extension). Poses survive the round trip exactly.
void save_results(const ResultRecord& record, const std::filesystem::path& path);
ResultRecord load_results(const std::filesystem::path& path);

/// Writes per-iteration optimizer statistics as CSV.
void save_iteration_stats(const std::vector<IterationStats>& stats,
                          const std::filesystem::path& path);

/// Probability mass over ranks 1..2^N induced by per-rule probabilities.
/// N must be <= 16.
std::vector<double> rank_pmf(const std::vector<double>& rule_probs);

/// Deterministic benchmark scenes:
///  - "slot":          plate graspable only through a narrow gap between two walls
///  - "bowl-rim":      stick standing inside a ring of obstacle points
///  - "open":          sphere with no obstacles
///  - "intent-blocked": plate whose intent-matching region lies inside a wall
///  - "intent-open":    same plate with the region on the free end
Scene make_synthetic_scene(const std::string& name, std::uint64_t seed);

/// Names accepted by make_synthetic_scene.
const std::vector<std::string>& synthetic_scene_names();

} // namespace grace
