#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grace/criteria.hpp"
#include "grace/hierarchy.hpp"
#include "grace/scene.hpp"

namespace grace {

enum class GraspOrigin { Sampled, Perturbed, Carried };

const char* to_string(GraspOrigin origin);
GraspOrigin grasp_origin_from_string(const std::string& text);

/// One evaluated grasp candidate.
struct GraspRow {
    Pose pose;
    std::vector<std::vector<double>> criterion_probs; ///< aligned with hierarchy rules
    std::vector<double> rule_probs;                   ///< q_i per rule
    double expected_utility = 0.0;                    ///< U, in [-2^N, -1]
    double log_bound = 0.0;                           ///< L
    int iteration = 0;                                ///< iteration that produced the pose
    GraspOrigin origin = GraspOrigin::Sampled;
};

/// Per-outer-iteration progress for CSV reporting.
struct IterationStats {
    int iteration = 0;
    double best_utility = 0.0;
    double mean_utility = 0.0;
    std::vector<double> best_rule_probs;
};

/// A set of evaluated candidates plus provenance. Sorted descending by
/// expected utility after every selection step.
struct GraspBatch {
    std::vector<GraspRow> rows;
    std::uint64_t seed = 0;
    std::vector<IterationStats> stats;
    std::int64_t evaluations = 0; ///< number of full utility evaluations

    bool empty() const { return rows.empty(); }
    std::size_t size() const { return rows.size(); }
    const GraspRow& best() const { return rows.front(); }
};

/// Initial pose distribution q0.
struct SamplerSpec {
    enum class Kind { SurfaceAntipodal, UniformBox, File };
    Kind kind = Kind::SurfaceAntipodal;

    // surface-antipodal
    double standoff = 0.05;      ///< meters along the outward normal
    double yaw_jitter = M_PI;    ///< closing axis drawn uniformly from +-yaw_jitter

    // uniform-box
    Eigen::Vector3d box_lo = Eigen::Vector3d(-0.1, -0.1, 0.0);
    Eigen::Vector3d box_hi = Eigen::Vector3d(0.1, 0.1, 0.2);

    // file
    std::vector<Pose> poses; ///< used verbatim (n is ignored)
};

struct OptimizerConfig {
    int outer_iterations = 10;     ///< T
    int inner_steps = 5;           ///< K
    double step_size = 0.01;       ///< eta
    Eigen::Matrix<double, 6, 6> covariance = default_covariance(); ///< Sigma
    int selection_size = 50;       ///< Q
    int batch = 50;                ///< initial sample count
    std::uint64_t seed = 0;
    double max_step_norm = 0.05;   ///< per-inner-step tangent clip

    static Eigen::Matrix<double, 6, 6> default_covariance(double trans_std = 0.01,
                                                          double rot_std = 0.05);
    void validate() const;
};

/// Draws n initial grasps. The surface sampler picks a random cloud point,
/// aligns the gripper approach with the inward normal, offsets by the
/// standoff and spins the closing axis about the approach by a uniform
/// jitter angle. Deterministic per seed.
std::vector<Pose> sample_initial(const SamplerSpec& spec, const Scene& scene, int n,
                                 std::uint64_t seed);

/// Evaluates all criterion probabilities, rule products, expected utility
/// and log bound for each pose.
GraspBatch evaluate_batch(const std::vector<Pose>& poses, const Scene& scene,
                          const RuleHierarchy& hierarchy, const EvaluatorRegistry& registry,
                          int iteration = 0, GraspOrigin origin = GraspOrigin::Sampled);

/// Gradient of the log lower bound at g: sum over criteria of
/// grad(p) / max(p, kProbFloor).
TangentVector log_bound_gradient(const Pose& g, const Scene& scene,
                                 const RuleHierarchy& hierarchy,
                                 const EvaluatorRegistry& registry);

/// K steps of clipped gradient ascent on the log bound applied to every
/// pose in the batch; K = 0 returns the batch unchanged. Probabilities are
/// re-evaluated at the final poses.
GraspBatch inner_gradient_ascent(const GraspBatch& batch, const Scene& scene,
                                 const RuleHierarchy& hierarchy,
                                 const EvaluatorRegistry& registry, int k, double eta,
                                 double max_step_norm = 0.05);

/// Evolution-strategy outer loop with a gradient inner loop: sample,
/// perturb with Gaussian tangent noise, ascend the log bound, then keep the
/// top Q by expected utility (carried elites included, so the best utility
/// never decreases). Deterministic per seed.
GraspBatch grace_opt(const Scene& scene, const RuleHierarchy& hierarchy,
                     const OptimizerConfig& config, const SamplerSpec& sampler,
                     const EvaluatorRegistry& registry = EvaluatorRegistry::standard());

/// Samples n poses, scores them once, returns the top Q. No refinement.
GraspBatch filter_baseline(const Scene& scene, const RuleHierarchy& hierarchy,
                           const SamplerSpec& sampler, int n, int top_q, std::uint64_t seed,
                           const EvaluatorRegistry& registry = EvaluatorRegistry::standard());

} // namespace grace
