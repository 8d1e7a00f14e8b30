#include "grace/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grace/error.hpp"

namespace grace {

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

namespace {

double sigmoid_slope(double x) {
    const double s = sigmoid(x);
    return s * (1.0 - s);
}

const SerialChain& require_chain(const Scene& scene) {
    if (!scene.chain.has_value()) {
        throw ConfigError("scene.chain: execution criterion requires a serial chain");
    }
    return *scene.chain;
}

} // namespace

// ---------------------------------------------------------------------------
// Registry

EvaluatorRegistry EvaluatorRegistry::standard() {
    EvaluatorRegistry reg;
    reg.add(std::make_shared<StabilityEvaluator>());
    reg.add(std::make_shared<ExecutionEvaluator>());
    reg.add(std::make_shared<CollisionEvaluator>());
    reg.add(std::make_shared<IntentionEvaluator>());
    return reg;
}

void EvaluatorRegistry::add(EvaluatorPtr evaluator) {
    evaluators_[evaluator->id()] = std::move(evaluator);
}

bool EvaluatorRegistry::contains(const std::string& id) const {
    return evaluators_.count(id) > 0;
}

const CriterionEvaluator& EvaluatorRegistry::get(const std::string& id) const {
    auto it = evaluators_.find(id);
    if (it == evaluators_.end()) {
        throw ConfigError("criterion \"" + id + "\" is not registered");
    }
    return *it->second;
}

std::vector<std::string> EvaluatorRegistry::ids() const {
    std::vector<std::string> out;
    out.reserve(evaluators_.size());
    for (const auto& [id, _] : evaluators_) {
        out.push_back(id);
    }
    return out;
}

TangentVector gradient_of(const CriterionEvaluator& evaluator, const Pose& g,
                          const Scene& scene) {
    return evaluator.gradient(g, scene);
}

// ---------------------------------------------------------------------------
// Execution

namespace {

struct ExecutionState {
    IkResult ik;
    double distance = 0.0;
    double omega = 0.0;
};

ExecutionState run_ik(const Pose& g, const Scene& scene) {
    const SerialChain& chain = require_chain(scene);
    ExecutionState st;
    IkOptions opts;
    opts.rot_weight = scene.params.rot_weight;
    st.ik = solve_ik(chain, g, chain.mid_range(), opts);
    st.distance = se3_distance(g, st.ik.pose, scene.params.rot_weight);
    st.omega = manipulability(chain, st.ik.theta);
    return st;
}

double execution_probability(const ExecutionState& st, const ClassifierParams& p) {
    if (st.distance > p.eps_pose) {
        return sigmoid(-p.c_manip * st.distance);
    }
    return sigmoid(p.c_omega * (st.omega - p.omega_threshold));
}

/// Gradient of the distance branch with the IK pose held fixed.
TangentVector execution_gradient(const Pose& g, const ExecutionState& st,
                                 const ClassifierParams& p) {
    TangentVector grad = TangentVector::Zero();
    if (st.distance <= p.eps_pose) {
        return grad; // manipulability branch: theta treated as locally constant
    }
    TangentVector d_dist = TangentVector::Zero();
    const Eigen::Vector3d dt = g.translation - st.ik.pose.translation;
    const double tnorm = dt.norm();
    if (tnorm > 1e-12) {
        d_dist.head<3>() = dt / tnorm;
    }
    const Eigen::Quaterniond q_rel = g.rotation.conjugate() * st.ik.pose.rotation;
    const Eigen::Vector3d log_rel = quat_log(q_rel);
    const double angle = log_rel.norm();
    if (angle > 1e-12) {
        d_dist.tail<3>() = -p.rot_weight * (log_rel / angle);
    }
    const double slope = sigmoid_slope(-p.c_manip * st.distance);
    return -p.c_manip * slope * d_dist;
}

} // namespace

const std::string& ExecutionEvaluator::id() const {
    static const std::string name = "execution";
    return name;
}

double ExecutionEvaluator::evaluate(const Pose& g, const Scene& scene) const {
    return execution_probability(run_ik(g, scene), scene.params);
}

TangentVector ExecutionEvaluator::gradient(const Pose& g, const Scene& scene) const {
    return execution_gradient(g, run_ik(g, scene), scene.params);
}

std::pair<double, TangentVector> ExecutionEvaluator::evaluate_with_gradient(
    const Pose& g, const Scene& scene) const {
    const ExecutionState st = run_ik(g, scene);
    return {execution_probability(st, scene.params), execution_gradient(g, st, scene.params)};
}

ExecutionEvaluator::BranchDiagnostic ExecutionEvaluator::diagnose(const Pose& g,
                                                                  const Scene& scene) const {
    const ExecutionState st = run_ik(g, scene);
    BranchDiagnostic diag;
    diag.ik_matched = st.distance <= scene.params.eps_pose;
    diag.ik_distance = st.distance;
    diag.omega = st.omega;
    diag.p_distance_branch = sigmoid(-scene.params.c_manip * st.distance);
    diag.p_manip_branch =
        sigmoid(scene.params.c_omega * (st.omega - scene.params.omega_threshold));
    return diag;
}

// ---------------------------------------------------------------------------
// Collision

namespace {

const PointCloud* effective_obstacles(const Scene& scene, PointCloud& merged) {
    if (!scene.params.collide_with_target) {
        return &scene.obstacle_cloud;
    }
    merged = scene.obstacle_cloud;
    merged.points.insert(merged.points.end(), scene.target_cloud.points.begin(),
                         scene.target_cloud.points.end());
    merged.normals.clear();
    return &merged;
}

} // namespace

const std::string& CollisionEvaluator::id() const {
    static const std::string name = "collision";
    return name;
}

double CollisionEvaluator::mean_sdf(const Pose& g, const Scene& scene) {
    PointCloud merged;
    const PointCloud* cloud = effective_obstacles(scene, merged);
    double sum = 0.0;
    for (const auto& box : scene.gripper.boxes) {
        sum += box_sdf(*cloud, box, g);
    }
    return sum / static_cast<double>(scene.gripper.boxes.size());
}

double CollisionEvaluator::evaluate(const Pose& g, const Scene& scene) const {
    PointCloud merged;
    const PointCloud* cloud = effective_obstacles(scene, merged);
    if (cloud->empty()) {
        return 1.0; // nothing to collide with
    }
    const double dbar = mean_sdf(g, scene);
    const auto& p = scene.params;
    const double z = p.literal_collision_sign ? p.c_collision * (p.sdf_threshold - dbar)
                                              : p.c_collision * (dbar - p.sdf_threshold);
    return sigmoid(z);
}

std::pair<double, TangentVector> CollisionEvaluator::evaluate_with_gradient(
    const Pose& g, const Scene& scene) const {
    PointCloud merged;
    const PointCloud* cloud = effective_obstacles(scene, merged);
    if (cloud->empty()) {
        return {1.0, TangentVector::Zero()};
    }
    double dbar = 0.0;
    TangentVector d_dbar = TangentVector::Zero();
    for (const auto& box : scene.gripper.boxes) {
        const BoxPointDistance acc = box_sdf_with_gradient(*cloud, box, g);
        dbar += acc.distance;
        d_dbar += acc.d_tangent;
    }
    const double inv = 1.0 / static_cast<double>(scene.gripper.boxes.size());
    dbar *= inv;
    d_dbar *= inv;

    const auto& p = scene.params;
    const double sign = p.literal_collision_sign ? -1.0 : 1.0;
    const double z = sign * p.c_collision * (dbar - p.sdf_threshold);
    const double slope = sigmoid_slope(z);
    return {sigmoid(z), TangentVector(sign * p.c_collision * slope * d_dbar)};
}

TangentVector CollisionEvaluator::gradient(const Pose& g, const Scene& scene) const {
    return evaluate_with_gradient(g, scene).second;
}

// ---------------------------------------------------------------------------
// Stability

namespace {

struct StabilityState {
    double score = 0.0;
    TangentVector d_score = TangentVector::Zero();
};

StabilityState stability_score(const Pose& g, const Scene& scene, bool with_gradient) {
    if (!scene.target_cloud.has_normals()) {
        throw ConfigError(
            "scene.target_cloud: stability criterion requires normals "
            "(load them or run estimate_normals)");
    }
    const auto& params = scene.params;
    const auto& gripper = scene.gripper;
    const Eigen::Matrix3d rot = g.rotation.toRotationMatrix();
    const Eigen::Vector3d closing_world = rot * gripper.closing_axis;
    const double inv_sigma_sq = 1.0 / (params.sigma_region * params.sigma_region);

    // d(n . c_hat)/d_omega = c0 x (R^T n)
    StabilityState st;
    for (std::size_t k = 0; k < scene.target_cloud.size(); ++k) {
        const Eigen::Vector3d& x = scene.target_cloud.points[k];
        const Eigen::Vector3d& n = scene.target_cloud.normals[k];
        const BoxPointDistance rho = box_point_distance(g, gripper.closing_region, x);
        const double weight = std::exp(-0.5 * rho.distance * rho.distance * inv_sigma_sq);
        if (weight < 1e-16) {
            continue;
        }
        const double align = n.dot(closing_world);
        st.score += weight * align * align;
        if (with_gradient) {
            const TangentVector d_weight =
                weight * (-rho.distance * inv_sigma_sq) * rho.d_tangent;
            st.d_score += align * align * d_weight;
            TangentVector d_align_sq = TangentVector::Zero();
            d_align_sq.tail<3>() =
                2.0 * align * gripper.closing_axis.cross(rot.transpose() * n);
            st.d_score += weight * d_align_sq;
        }
    }
    return st;
}

} // namespace

const std::string& StabilityEvaluator::id() const {
    static const std::string name = "stability";
    return name;
}

double StabilityEvaluator::alignment_score(const Pose& g, const Scene& scene) {
    return stability_score(g, scene, false).score;
}

double StabilityEvaluator::evaluate(const Pose& g, const Scene& scene) const {
    const double score = stability_score(g, scene, false).score;
    return sigmoid(scene.params.c_stability * (score - scene.params.stability_threshold));
}

std::pair<double, TangentVector> StabilityEvaluator::evaluate_with_gradient(
    const Pose& g, const Scene& scene) const {
    const StabilityState st = stability_score(g, scene, true);
    const double z =
        scene.params.c_stability * (st.score - scene.params.stability_threshold);
    return {sigmoid(z),
            TangentVector(scene.params.c_stability * sigmoid_slope(z) * st.d_score)};
}

TangentVector StabilityEvaluator::gradient(const Pose& g, const Scene& scene) const {
    return evaluate_with_gradient(g, scene).second;
}

// ---------------------------------------------------------------------------
// Intention

namespace {

struct IntentionState {
    double probability = 1.0;
    TangentVector d_probability = TangentVector::Zero();
};

IntentionState intention_eval(const Pose& g, const Scene& scene) {
    if (!scene.intent.has_value()) {
        throw ConfigError("scene.intent: intention criterion requires an intent label");
    }
    const auto& params = scene.params;

    // Base score: distance to the nearest region matching the intent.
    double base;
    Eigen::Vector3d d_base_t = Eigen::Vector3d::Zero();
    double best_dist = std::numeric_limits<double>::infinity();
    Eigen::Vector3d best_dir = Eigen::Vector3d::Zero();
    bool matched = false;
    for (const auto& region : scene.affordance_regions) {
        if (std::find(region.intents.begin(), region.intents.end(), *scene.intent) ==
            region.intents.end()) {
            continue;
        }
        matched = true;
        const PointToBox d = point_to_box_distance(g.translation, region.box);
        if (d.distance < best_dist) {
            best_dist = d.distance;
            best_dir = d.d_point;
        }
    }
    if (matched) {
        const double z = params.c_intent * (params.intent_radius - best_dist);
        base = sigmoid(z);
        d_base_t = -params.c_intent * sigmoid_slope(z) * best_dir;
    } else {
        base = sigmoid(-params.c_intent * params.intent_radius);
    }

    // Proximity gate: scores far from the object surface are pulled to zero.
    double gate = 1.0;
    Eigen::Vector3d d_gate_t = Eigen::Vector3d::Zero();
    if (!scene.target_cloud.empty()) {
        double cloud_dist_sq = std::numeric_limits<double>::infinity();
        Eigen::Vector3d nearest = Eigen::Vector3d::Zero();
        for (const auto& x : scene.target_cloud.points) {
            const double d2 = (g.translation - x).squaredNorm();
            if (d2 < cloud_dist_sq) {
                cloud_dist_sq = d2;
                nearest = x;
            }
        }
        const double cloud_dist = std::sqrt(cloud_dist_sq);
        const double zg = params.c_gate * (params.gate_radius - cloud_dist);
        gate = sigmoid(zg);
        if (cloud_dist > 1e-12) {
            d_gate_t = -params.c_gate * sigmoid_slope(zg) *
                       Eigen::Vector3d((g.translation - nearest) / cloud_dist);
        }
    }

    IntentionState st;
    st.probability = base * gate;
    st.d_probability.head<3>() = d_base_t * gate + base * d_gate_t;
    return st;
}

} // namespace

const std::string& IntentionEvaluator::id() const {
    static const std::string name = "intention";
    return name;
}

double IntentionEvaluator::evaluate(const Pose& g, const Scene& scene) const {
    return intention_eval(g, scene).probability;
}

TangentVector IntentionEvaluator::gradient(const Pose& g, const Scene& scene) const {
    return intention_eval(g, scene).d_probability;
}

std::pair<double, TangentVector> IntentionEvaluator::evaluate_with_gradient(
    const Pose& g, const Scene& scene) const {
    const IntentionState st = intention_eval(g, scene);
    return {st.probability, st.d_probability};
}

} // namespace grace
