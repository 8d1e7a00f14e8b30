#include "grace/optimizer.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "grace/error.hpp"
#include "grace/rng.hpp"

namespace grace {

const char* to_string(GraspOrigin origin) {
    switch (origin) {
        case GraspOrigin::Sampled: return "sampled";
        case GraspOrigin::Perturbed: return "perturbed";
        case GraspOrigin::Carried: return "carried";
    }
    return "sampled";
}

GraspOrigin grasp_origin_from_string(const std::string& text) {
    if (text == "perturbed") return GraspOrigin::Perturbed;
    if (text == "carried") return GraspOrigin::Carried;
    if (text == "sampled") return GraspOrigin::Sampled;
    throw DomainError("unknown grasp origin \"" + text + "\"");
}

Eigen::Matrix<double, 6, 6> OptimizerConfig::default_covariance(double trans_std,
                                                                double rot_std) {
    Eigen::Matrix<double, 6, 1> diag;
    diag << trans_std, trans_std, trans_std, rot_std, rot_std, rot_std;
    return diag.cwiseProduct(diag).asDiagonal();
}

void OptimizerConfig::validate() const {
    if (outer_iterations < 1) throw DomainError("optimizer: outer iterations must be >= 1");
    if (inner_steps < 0) throw DomainError("optimizer: inner steps must be >= 0");
    if (!(step_size > 0.0)) throw DomainError("optimizer: step size must be > 0");
    if (selection_size < 1) throw DomainError("optimizer: selection size must be >= 1");
    if (batch < 1) throw DomainError("optimizer: batch must be >= 1");
    if (!(max_step_norm > 0.0)) throw DomainError("optimizer: step clip must be > 0");
    if (!covariance.isApprox(covariance.transpose(), 1e-12)) {
        throw DomainError("optimizer: covariance must be symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> eig(covariance);
    if (eig.eigenvalues().minCoeff() < -1e-12) {
        throw DomainError("optimizer: covariance must be positive semidefinite");
    }
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

Eigen::Vector3d any_orthogonal(const Eigen::Vector3d& v) {
    const Eigen::Vector3d ref =
        std::abs(v.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
    return v.cross(ref).normalized();
}

Pose sample_surface_grasp(const SamplerSpec& spec, const Scene& scene, Prng& rng) {
    const auto& cloud = scene.target_cloud;
    const std::size_t idx = rng.index(cloud.size());
    const Eigen::Vector3d point = cloud.points[idx];
    const Eigen::Vector3d normal = cloud.normals[idx];

    // Gripper +z (approach) points along the inward normal; the closing
    // axis spins about the approach by the jitter angle.
    const Eigen::Vector3d approach = -normal;
    const Eigen::Vector3d tangent = any_orthogonal(approach);
    const double angle = rng.uniform(-spec.yaw_jitter, spec.yaw_jitter);
    const Eigen::Vector3d closing =
        std::cos(angle) * tangent + std::sin(angle) * approach.cross(tangent);
    Eigen::Matrix3d rot;
    rot.col(1) = closing;                  // gripper y: closing axis
    rot.col(2) = approach;                 // gripper z: approach
    rot.col(0) = closing.cross(approach);  // gripper x completes the frame
    return Pose(point + spec.standoff * normal, Eigen::Quaterniond(rot));
}

Pose sample_uniform_box(const SamplerSpec& spec, Prng& rng) {
    Eigen::Vector3d t;
    for (int c = 0; c < 3; ++c) {
        t[c] = rng.uniform(spec.box_lo[c], spec.box_hi[c]);
    }
    // Shoemake uniform random rotation.
    const double u1 = rng.uniform01();
    const double u2 = rng.uniform01();
    const double u3 = rng.uniform01();
    const double a = std::sqrt(1.0 - u1);
    const double b = std::sqrt(u1);
    const Eigen::Quaterniond q(a * std::sin(2.0 * M_PI * u2), a * std::cos(2.0 * M_PI * u2),
                               b * std::sin(2.0 * M_PI * u3), b * std::cos(2.0 * M_PI * u3));
    return Pose(t, q);
}

} // namespace

std::vector<Pose> sample_initial(const SamplerSpec& spec, const Scene& scene, int n,
                                 std::uint64_t seed) {
    if (spec.kind == SamplerSpec::Kind::File) {
        return spec.poses;
    }
    if (n < 1) {
        throw DomainError("sample_initial: n must be >= 1");
    }
    if (spec.kind == SamplerSpec::Kind::SurfaceAntipodal) {
        if (scene.target_cloud.empty()) {
            throw DomainError("sample_initial: surface sampler needs a non-empty target cloud");
        }
        if (!scene.target_cloud.has_normals()) {
            throw DomainError("sample_initial: surface sampler needs target normals");
        }
    }
    Prng rng(derive_seed(seed, 0x5a3)); // one stream for the whole initial batch
    std::vector<Pose> poses;
    poses.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (spec.kind == SamplerSpec::Kind::SurfaceAntipodal) {
            poses.push_back(sample_surface_grasp(spec, scene, rng));
        } else {
            poses.push_back(sample_uniform_box(spec, rng));
        }
    }
    return poses;
}

// ---------------------------------------------------------------------------
// Evaluation

GraspBatch evaluate_batch(const std::vector<Pose>& poses, const Scene& scene,
                          const RuleHierarchy& hierarchy, const EvaluatorRegistry& registry,
                          int iteration, GraspOrigin origin) {
    GraspBatch batch;
    batch.rows.reserve(poses.size());
    for (const auto& pose : poses) {
        GraspRow row;
        row.pose = pose;
        row.iteration = iteration;
        row.origin = origin;
        row.criterion_probs.reserve(hierarchy.rules().size());
        for (const auto& rule : hierarchy.rules()) {
            std::vector<double> ps;
            ps.reserve(rule.criteria.size());
            for (const auto& id : rule.criteria) {
                ps.push_back(registry.get(id).evaluate(pose, scene));
            }
            row.criterion_probs.push_back(std::move(ps));
        }
        const RuleProbabilities probs(row.criterion_probs);
        row.rule_probs = probs.rule_products();
        row.expected_utility = expected_utility(probs);
        row.log_bound = log_lower_bound(probs);
        batch.rows.push_back(std::move(row));
        ++batch.evaluations;
    }
    return batch;
}

TangentVector log_bound_gradient(const Pose& g, const Scene& scene,
                                 const RuleHierarchy& hierarchy,
                                 const EvaluatorRegistry& registry) {
    TangentVector grad = TangentVector::Zero();
    for (const auto& rule : hierarchy.rules()) {
        for (const auto& id : rule.criteria) {
            const auto [p, dp] = registry.get(id).evaluate_with_gradient(g, scene);
            grad += dp / std::max(p, kProbFloor);
        }
    }
    return grad;
}

namespace {

Pose ascend_pose(Pose pose, const Scene& scene, const RuleHierarchy& hierarchy,
                 const EvaluatorRegistry& registry, int k, double eta, double max_step_norm) {
    for (int step = 0; step < k; ++step) {
        TangentVector delta = eta * log_bound_gradient(pose, scene, hierarchy, registry);
        const double norm = delta.norm();
        if (norm > max_step_norm) {
            delta *= max_step_norm / norm;
        }
        pose = retract(pose, delta);
    }
    return pose;
}

struct UtilityDescending {
    bool operator()(const GraspRow& a, const GraspRow& b) const {
        return a.expected_utility > b.expected_utility;
    }
};

IterationStats make_stats(int iteration, const std::vector<GraspRow>& rows) {
    IterationStats st;
    st.iteration = iteration;
    const GraspRow* best = &rows.front();
    double sum = 0.0;
    for (const auto& row : rows) {
        sum += row.expected_utility;
        if (row.expected_utility > best->expected_utility) {
            best = &row;
        }
    }
    st.best_utility = best->expected_utility;
    st.mean_utility = sum / static_cast<double>(rows.size());
    st.best_rule_probs = best->rule_probs;
    return st;
}

bool same_pose_bits(const Pose& a, const Pose& b) {
    return a.translation == b.translation && a.rotation.coeffs() == b.rotation.coeffs();
}

} // namespace

GraspBatch inner_gradient_ascent(const GraspBatch& batch, const Scene& scene,
                                 const RuleHierarchy& hierarchy,
                                 const EvaluatorRegistry& registry, int k, double eta,
                                 double max_step_norm) {
    if (k < 0) {
        throw DomainError("inner_gradient_ascent: k must be >= 0");
    }
    if (k == 0) {
        return batch;
    }
    std::vector<Pose> poses;
    poses.reserve(batch.size());
    for (const auto& row : batch.rows) {
        poses.push_back(
            ascend_pose(row.pose, scene, hierarchy, registry, k, eta, max_step_norm));
    }
    GraspBatch out = evaluate_batch(poses, scene, hierarchy, registry);
    out.seed = batch.seed;
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        out.rows[i].iteration = batch.rows[i].iteration;
        out.rows[i].origin = batch.rows[i].origin;
    }
    out.evaluations +=
        batch.evaluations + static_cast<std::int64_t>(batch.size()) * k;
    return out;
}

GraspBatch grace_opt(const Scene& scene, const RuleHierarchy& hierarchy,
                     const OptimizerConfig& config, const SamplerSpec& sampler,
                     const EvaluatorRegistry& registry) {
    config.validate();

    // Square root of the covariance for tangent-space noise; PSD-safe.
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> eig(config.covariance);
    const Eigen::Matrix<double, 6, 6> noise_root =
        eig.eigenvectors() *
        eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
        eig.eigenvectors().transpose();
    const bool zero_noise = noise_root.isZero(0.0);

    const std::vector<Pose> initial =
        sample_initial(sampler, scene, config.batch, config.seed);
    GraspBatch current = evaluate_batch(initial, scene, hierarchy, registry, 0,
                                        GraspOrigin::Sampled);
    current.seed = config.seed;
    current.stats.push_back(make_stats(0, current.rows));

    for (int t = 1; t <= config.outer_iterations; ++t) {
        // Perturb every carried pose in its local tangent.
        std::vector<Pose> perturbed;
        perturbed.reserve(current.size());
        for (std::size_t i = 0; i < current.rows.size(); ++i) {
            TangentVector xi = TangentVector::Zero();
            if (!zero_noise) {
                Prng rng(derive_seed(config.seed, 0xe5, static_cast<std::uint64_t>(t), i));
                TangentVector z;
                for (int c = 0; c < 6; ++c) {
                    z[c] = rng.normal();
                }
                xi = noise_root * z;
            }
            perturbed.push_back(retract(current.rows[i].pose, xi));
        }

        // Inner gradient ascent on the log bound, then score by utility.
        std::vector<Pose> refined;
        refined.reserve(perturbed.size());
        for (auto& pose : perturbed) {
            refined.push_back(ascend_pose(pose, scene, hierarchy, registry,
                                          config.inner_steps, config.step_size,
                                          config.max_step_norm));
        }
        GraspBatch candidates =
            evaluate_batch(refined, scene, hierarchy, registry, t, GraspOrigin::Perturbed);
        current.evaluations += candidates.evaluations;
        // Inner gradient evaluations also count toward the budget.
        current.evaluations +=
            static_cast<std::int64_t>(refined.size()) * config.inner_steps;

        // Elitist selection: carried set plus refined candidates, stable
        // sort by utility (ties keep generation order), top Q. Candidates
        // whose pose is bit-identical to a carried one (zero noise and a
        // vanishing gradient) are dropped so the pool stays a set.
        std::vector<GraspRow> combined;
        combined.reserve(current.size() + candidates.size());
        for (auto& row : current.rows) {
            if (t > 1) {
                row.origin = GraspOrigin::Carried;
            }
            combined.push_back(std::move(row));
        }
        const std::size_t carried_count = combined.size();
        for (auto& row : candidates.rows) {
            bool duplicate = false;
            for (std::size_t i = 0; i < carried_count && !duplicate; ++i) {
                duplicate = same_pose_bits(combined[i].pose, row.pose);
            }
            if (!duplicate) {
                combined.push_back(std::move(row));
            }
        }
        std::stable_sort(combined.begin(), combined.end(), UtilityDescending{});
        if (combined.size() > static_cast<std::size_t>(config.selection_size)) {
            combined.resize(static_cast<std::size_t>(config.selection_size));
        }
        current.rows = std::move(combined);
        current.stats.push_back(make_stats(t, current.rows));
    }
    return current;
}

GraspBatch filter_baseline(const Scene& scene, const RuleHierarchy& hierarchy,
                           const SamplerSpec& sampler, int n, int top_q, std::uint64_t seed,
                           const EvaluatorRegistry& registry) {
    if (top_q < 1) {
        throw DomainError("filter_baseline: top_q must be >= 1");
    }
    if (n < top_q) {
        throw DomainError("filter_baseline: n (" + std::to_string(n) +
                          ") must be >= top_q (" + std::to_string(top_q) + ")");
    }
    const std::vector<Pose> poses = sample_initial(sampler, scene, n, seed);
    GraspBatch batch =
        evaluate_batch(poses, scene, hierarchy, registry, 0, GraspOrigin::Sampled);
    batch.seed = seed;
    std::stable_sort(batch.rows.begin(), batch.rows.end(), UtilityDescending{});
    if (batch.rows.size() > static_cast<std::size_t>(top_q)) {
        batch.rows.resize(static_cast<std::size_t>(top_q));
    }
    batch.stats.push_back(make_stats(0, batch.rows));
    return batch;
}

} // namespace grace
