#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "grace/scene.hpp"

namespace grace {

/// Logistic function 1 / (1 + exp(-x)).
double sigmoid(double x);

/// Maps (pose, scene) to a satisfaction probability in [0,1] plus its
/// gradient with respect to the 6-D pose tangent at zero. Implementations
/// are immutable and their methods pure, so evaluation may run concurrently
/// across poses.
class CriterionEvaluator {
public:
    virtual ~CriterionEvaluator() = default;

    virtual const std::string& id() const = 0;
    virtual double evaluate(const Pose& g, const Scene& scene) const = 0;
    virtual TangentVector gradient(const Pose& g, const Scene& scene) const = 0;

    /// Probability and gradient together; overridden where the two share
    /// expensive work (the execution classifier reuses one IK solve).
    virtual std::pair<double, TangentVector> evaluate_with_gradient(const Pose& g,
                                                                    const Scene& scene) const {
        return {evaluate(g, scene), gradient(g, scene)};
    }
};

using EvaluatorPtr = std::shared_ptr<const CriterionEvaluator>;

/// Evaluators keyed by identifier. The default registry holds "stability",
/// "execution", "collision", and "intention".
class EvaluatorRegistry {
public:
    static EvaluatorRegistry standard();

    void add(EvaluatorPtr evaluator);
    bool contains(const std::string& id) const;
    const CriterionEvaluator& get(const std::string& id) const;
    std::vector<std::string> ids() const;

private:
    std::map<std::string, EvaluatorPtr> evaluators_;
};

/// Convenience dispatch mirroring CriterionEvaluator::gradient.
TangentVector gradient_of(const CriterionEvaluator& evaluator, const Pose& g, const Scene& scene);

// ---------------------------------------------------------------------------
// Builtin evaluators.

/// Reachability and distance-to-singularity. Solves IK from the chain's
/// mid-range seed; if the reached pose differs from the grasp by more than
/// eps_pose the probability is sigmoid(-C_m * d(g, g_ik)), otherwise
/// sigmoid(C_w * (manipulability - omega_threshold)). The gradient holds
/// the IK solution fixed, so it is zero on the manipulability branch.
class ExecutionEvaluator final : public CriterionEvaluator {
public:
    const std::string& id() const override;
    double evaluate(const Pose& g, const Scene& scene) const override;
    TangentVector gradient(const Pose& g, const Scene& scene) const override;
    std::pair<double, TangentVector> evaluate_with_gradient(const Pose& g,
                                                            const Scene& scene) const override;

    /// Both branch values at g, for inspecting the switch discontinuity.
    struct BranchDiagnostic {
        bool ik_matched = false;   ///< true when the manipulability branch is active
        double ik_distance = 0.0;  ///< se3_distance(g, FK(theta))
        double omega = 0.0;
        double p_distance_branch = 0.0;
        double p_manip_branch = 0.0;
        double jump() const { return std::abs(p_distance_branch - p_manip_branch); }
    };
    BranchDiagnostic diagnose(const Pose& g, const Scene& scene) const;
};

/// Mean gripper-box SDF against the obstacle cloud, squashed by a sigmoid.
/// An empty obstacle cloud is vacuously collision-free (probability 1).
class CollisionEvaluator final : public CriterionEvaluator {
public:
    const std::string& id() const override;
    double evaluate(const Pose& g, const Scene& scene) const override;
    TangentVector gradient(const Pose& g, const Scene& scene) const override;
    std::pair<double, TangentVector> evaluate_with_gradient(const Pose& g,
                                                            const Scene& scene) const override;

    /// Mean of the three box SDFs over the effective obstacle cloud.
    static double mean_sdf(const Pose& g, const Scene& scene);
};

/// Analytic contact-alignment score: smooth membership of target points in
/// the closing region, weighted by squared alignment of their normals with
/// the closing axis. Requires target normals.
class StabilityEvaluator final : public CriterionEvaluator {
public:
    const std::string& id() const override;
    double evaluate(const Pose& g, const Scene& scene) const override;
    TangentVector gradient(const Pose& g, const Scene& scene) const override;
    std::pair<double, TangentVector> evaluate_with_gradient(const Pose& g,
                                                            const Scene& scene) const override;

    /// The raw alignment score A(g) before the sigmoid.
    static double alignment_score(const Pose& g, const Scene& scene);
};

/// Distance to the nearest affordance region matching the scene intent,
/// gated to zero away from the target cloud (gate radius 0.03 m).
class IntentionEvaluator final : public CriterionEvaluator {
public:
    const std::string& id() const override;
    double evaluate(const Pose& g, const Scene& scene) const override;
    TangentVector gradient(const Pose& g, const Scene& scene) const override;
    std::pair<double, TangentVector> evaluate_with_gradient(const Pose& g,
                                                            const Scene& scene) const override;
};

} // namespace grace
