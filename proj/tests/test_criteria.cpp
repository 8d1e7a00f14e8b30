#include "grace/criteria.hpp"

#include <cmath>

#include "doctest.h"
#include "grace/error.hpp"
#include "grace/rng.hpp"
#include "oracles.hpp"

using namespace grace;
using grace::testing::finite_difference_gradient;
using grace::testing::gradient_relative_error;

namespace {

PointCloud plate_cloud(double half_x, double half_z, double y, double spacing) {
    PointCloud cloud;
    for (double x = -half_x; x <= half_x + 1e-12; x += spacing) {
        for (double z = -half_z; z <= half_z + 1e-12; z += spacing) {
            cloud.points.emplace_back(x, y, z);
            cloud.normals.emplace_back(0, 1, 0);
            cloud.points.emplace_back(x, -y, z);
            cloud.normals.emplace_back(0, -1, 0);
        }
    }
    return cloud;
}

Scene base_scene() {
    Scene scene;
    scene.name = "unit";
    scene.target_cloud = plate_cloud(0.03, 0.03, 0.003, 0.008);
    scene.chain = SerialChain::default_arm(Pose::from_translation({-0.45, 0.0, -0.10}));
    scene.intent = "use";
    AffordanceRegion region;
    region.box.pose = Pose::from_translation({0.0, 0.0, 0.0});
    region.box.half_extent = {0.05, 0.05, 0.05};
    region.intents = {"use"};
    scene.affordance_regions.push_back(region);
    return scene;
}

/// A grasp straddling the plate: closing axis along +y (the plate normal),
/// approach along -z, fingers reaching down past the grasp point.
Pose straddle_grasp(double x = 0.0, double z_offset = 0.05) {
    Eigen::Matrix3d rot;
    rot.col(1) = Eigen::Vector3d::UnitY();
    rot.col(2) = -Eigen::Vector3d::UnitZ();
    rot.col(0) = rot.col(1).cross(rot.col(2));
    return Pose(Eigen::Vector3d(x, 0.0, z_offset), Eigen::Quaterniond(rot));
}

PointCloud blob_cloud(const Eigen::Vector3d& center, double half, double spacing) {
    PointCloud cloud;
    for (double x = -half; x <= half + 1e-12; x += spacing) {
        for (double y = -half; y <= half + 1e-12; y += spacing) {
            for (double z = -half; z <= half + 1e-12; z += spacing) {
                cloud.points.push_back(center + Eigen::Vector3d(x, y, z));
            }
        }
    }
    return cloud;
}

class ConstantEvaluator final : public CriterionEvaluator {
public:
    explicit ConstantEvaluator(double p) : p_(p) {}
    const std::string& id() const override {
        static const std::string name = "constant";
        return name;
    }
    double evaluate(const Pose&, const Scene&) const override { return p_; }
    TangentVector gradient(const Pose&, const Scene&) const override {
        return TangentVector::Zero();
    }

private:
    double p_;
};

Prng& shared_rng() {
    static Prng rng(77);
    return rng;
}

Pose random_pose_near(const Eigen::Vector3d& center, double span, double max_angle) {
    Prng& rng = shared_rng();
    const Eigen::Vector3d t = center + Eigen::Vector3d(rng.uniform(-span, span),
                                                       rng.uniform(-span, span),
                                                       rng.uniform(-span, span));
    const Eigen::Vector3d axis(rng.normal(), rng.normal(), rng.normal());
    return Pose::from_rotation_vector(axis.normalized() * rng.uniform(0.0, max_angle), t);
}

} // namespace

TEST_CASE("sigmoid: reference values") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(-10.0) == doctest::Approx(4.5398e-5).epsilon(1e-3));
    CHECK(sigmoid(-5.0) == doctest::Approx(6.6929e-3).epsilon(1e-3));
    CHECK(sigmoid(200.0 * (0.03 - 0.10)) == doctest::Approx(8.3153e-7).epsilon(1e-3));
}

TEST_CASE("execution: manipulability branch at the threshold gives 0.5") {
    Scene scene = base_scene();
    const ExecutionEvaluator exec;
    const Pose g = straddle_grasp(0.0, 0.12);
    const auto diag = exec.diagnose(g, scene);
    REQUIRE(diag.ik_matched);
    scene.params.omega_threshold = diag.omega;
    CHECK(exec.evaluate(g, scene) == doctest::Approx(0.5).epsilon(1e-9));
    scene.params.omega_threshold = 0.0;
    scene.params.c_omega = 500.0;
    CHECK(exec.evaluate(g, scene) > 0.99);
}

TEST_CASE("execution: unreachable pose uses the distance branch") {
    Scene scene = base_scene();
    const ExecutionEvaluator exec;
    const Pose far = Pose::from_translation({3.0, 0.0, 0.0});
    const auto diag = exec.diagnose(far, scene);
    CHECK(!diag.ik_matched);
    CHECK(diag.ik_distance > 1.0);
    const double p = exec.evaluate(far, scene);
    CHECK(p == doctest::Approx(sigmoid(-scene.params.c_manip * diag.ik_distance)));
    CHECK(p < 1e-3);
    // Distance branch at d = 2 with C_m = 5 equals sigmoid(-10).
    CHECK(sigmoid(-5.0 * 2.0) == doctest::Approx(4.54e-5).epsilon(1e-2));
}

TEST_CASE("execution: branch diagnostic reports the switch discontinuity") {
    Scene scene = base_scene();
    const ExecutionEvaluator exec;
    const auto diag = exec.diagnose(straddle_grasp(0.0, 0.12), scene);
    CHECK(diag.jump() ==
          doctest::Approx(std::abs(diag.p_distance_branch - diag.p_manip_branch)));
    CHECK(diag.p_distance_branch <= 1.0);
    CHECK(diag.p_manip_branch <= 1.0);
}

TEST_CASE("execution: distance-branch gradient matches FD with the IK pose fixed") {
    Scene scene = base_scene();
    scene.params.eps_pose = 1e-12; // force the distance branch
    const ExecutionEvaluator exec;
    int tested = 0;
    for (int i = 0; i < 40 && tested < 8; ++i) {
        const Pose g = random_pose_near({0.6, 0.4, 0.4}, 0.2, 1.0);
        const auto diag = exec.diagnose(g, scene);
        if (diag.ik_distance < 1e-3) {
            continue;
        }
        const auto [p, grad] = exec.evaluate_with_gradient(g, scene);
        if (p < 1e-6) {
            continue; // saturated: both sides vanish numerically
        }
        const Pose g_ik = solve_ik(*scene.chain, g, scene.chain->mid_range()).pose;
        const auto fd = finite_difference_gradient(
            [&](const Pose& q) {
                return sigmoid(-scene.params.c_manip *
                               se3_distance(q, g_ik, scene.params.rot_weight));
            },
            g);
        CHECK(gradient_relative_error(grad, fd) <= 1e-3);
        ++tested;
    }
    CHECK(tested > 0);
}

TEST_CASE("collision: empty obstacle cloud is vacuously free") {
    Scene scene = base_scene();
    const CollisionEvaluator coll;
    CHECK(coll.evaluate(straddle_grasp(), scene) == 1.0);
    CHECK(coll.gradient(straddle_grasp(), scene).norm() == 0.0);
}

TEST_CASE("collision: threshold crossing, saturation, and the literal sign") {
    Scene scene = base_scene();
    scene.obstacle_cloud = blob_cloud({0.3, 0.0, 0.05}, 0.02, 0.01);
    const CollisionEvaluator coll;
    const Pose g = straddle_grasp();
    const double dbar = CollisionEvaluator::mean_sdf(g, scene);
    CHECK(dbar > 0.0);
    scene.params.sdf_threshold = dbar;
    CHECK(coll.evaluate(g, scene) == doctest::Approx(0.5).epsilon(1e-12));
    scene.params.sdf_threshold = 0.02;
    CHECK(coll.evaluate(Pose::from_translation({0, 0, 5.0}), scene) > 0.999);
    scene.params.literal_collision_sign = true;
    CHECK(coll.evaluate(Pose::from_translation({0, 0, 5.0}), scene) < 1e-3);
    scene.params.sdf_threshold = dbar;
    CHECK(coll.evaluate(g, scene) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("collision: fully contained points give sigmoid(-C_c d_th)") {
    Scene scene = base_scene();
    // Three coincident boxes so points inside one are inside all.
    Box big;
    big.half_extent = {0.05, 0.05, 0.05};
    scene.gripper.boxes = {big, big, big};
    scene.obstacle_cloud.points = {{0.0, 0.0, 0.01}, {0.01, -0.01, 0.0}};
    scene.params.sdf_threshold = 0.05;
    scene.params.c_collision = 100.0;
    const CollisionEvaluator coll;
    CHECK(coll.evaluate(Pose::identity(), scene) ==
          doctest::Approx(sigmoid(-5.0)).epsilon(1e-9));
    CHECK(sigmoid(-5.0) == doctest::Approx(6.69e-3).epsilon(1e-2));
}

TEST_CASE("collision: gradient matches finite differences") {
    Scene scene = base_scene();
    scene.params.sdf_threshold = 0.03;
    scene.params.c_collision = 60.0;
    const CollisionEvaluator coll;
    int tested = 0;
    while (tested < 25) {
        Scene trial = scene;
        trial.obstacle_cloud = blob_cloud({shared_rng().uniform(-0.05, 0.05),
                                           shared_rng().uniform(-0.05, 0.05),
                                           shared_rng().uniform(0.0, 0.1)},
                                          0.015, 0.01);
        const Pose g = random_pose_near({0.0, 0.0, 0.08}, 0.05, 0.8);
        const auto [p, grad] = coll.evaluate_with_gradient(g, trial);
        if (p < 0.02 || p > 0.98) {
            continue;
        }
        bool near_kink = false;
        for (const auto& box : trial.gripper.boxes) {
            const Pose to_local = compose(g, box.pose).inverse();
            for (const auto& x : trial.obstacle_cloud.points) {
                const Eigen::Vector3d d = to_local.apply(x).cwiseAbs() - box.half_extent;
                if (d.cwiseAbs().minCoeff() < 5e-5) {
                    near_kink = true;
                    break;
                }
            }
            if (near_kink) break;
        }
        if (near_kink) {
            continue;
        }
        const auto fd = finite_difference_gradient(
            [&](const Pose& q) { return coll.evaluate(q, trial); }, g);
        CHECK(gradient_relative_error(grad, fd) <= 1e-4);
        ++tested;
    }
}

TEST_CASE("collision: monotone while approaching a single blob") {
    Scene scene = base_scene();
    scene.obstacle_cloud = blob_cloud({0.0, 0.0, 0.06}, 0.02, 0.008);
    const CollisionEvaluator coll;
    const Eigen::Vector3d start(0.0, 0.0, 0.5);
    const Eigen::Vector3d centroid = scene.obstacle_cloud.centroid();
    double previous = 1.0;
    for (int step = 0; step <= 40; ++step) {
        // Stop at the blob boundary rather than translating through it.
        const double alpha = 0.9 * step / 40.0;
        const Pose g = Pose::from_translation(start + alpha * (centroid - start));
        const double p = coll.evaluate(g, scene);
        CHECK(p <= previous + 1e-12);
        previous = p;
    }
}

TEST_CASE("stability: plate grasped perpendicular vs edge-on vs free space") {
    Scene scene = base_scene();
    const StabilityEvaluator stab;

    const Pose good = straddle_grasp();
    CHECK(StabilityEvaluator::alignment_score(good, scene) > 3.0);
    CHECK(stab.evaluate(good, scene) > 0.9);

    // Quarter turn about the approach: closing axis now lies in the plate
    // plane, alignment vanishes.
    TangentVector quarter = TangentVector::Zero();
    quarter[5] = M_PI / 2.0;
    const Pose bad = retract(good, quarter);
    CHECK(StabilityEvaluator::alignment_score(bad, scene) < 0.05);
    const double base = sigmoid(-scene.params.c_stability * scene.params.stability_threshold);
    CHECK(stab.evaluate(bad, scene) == doctest::Approx(base).epsilon(2e-2));

    const Pose nowhere = Pose::from_translation({1.0, 1.0, 1.0});
    CHECK(stab.evaluate(nowhere, scene) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("stability: requires normals") {
    Scene scene = base_scene();
    scene.target_cloud.normals.clear();
    const StabilityEvaluator stab;
    CHECK_THROWS_AS(stab.evaluate(straddle_grasp(), scene), ConfigError);
}

TEST_CASE("stability: rigid invariance") {
    const Scene scene = base_scene();
    const StabilityEvaluator stab;
    const Pose g = straddle_grasp();
    const double base = stab.evaluate(g, scene);
    for (int i = 0; i < 8; ++i) {
        const Pose rigid = random_pose_near({0.2, -0.1, 0.3}, 0.4, 2.5);
        Scene moved = scene;
        moved.target_cloud = scene.target_cloud.transformed(rigid);
        CHECK(stab.evaluate(compose(rigid, g), moved) == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("stability: gradient matches finite differences") {
    Scene scene = base_scene();
    const StabilityEvaluator stab;
    int tested = 0;
    while (tested < 25) {
        const Pose g = random_pose_near({0.0, 0.0, 0.05}, 0.03, 0.6);
        const auto [p, grad] = stab.evaluate_with_gradient(g, scene);
        if (p < 0.02 || p > 0.98) {
            continue;
        }
        bool near_kink = false;
        const Pose to_local = compose(g, scene.gripper.closing_region.pose).inverse();
        for (const auto& x : scene.target_cloud.points) {
            const Eigen::Vector3d d =
                to_local.apply(x).cwiseAbs() - scene.gripper.closing_region.half_extent;
            if (d.cwiseAbs().minCoeff() < 5e-5) {
                near_kink = true;
                break;
            }
        }
        if (near_kink) {
            continue;
        }
        const auto fd = finite_difference_gradient(
            [&](const Pose& q) { return stab.evaluate(q, scene); }, g);
        CHECK(gradient_relative_error(grad, fd) <= 1e-4);
        ++tested;
    }
}

TEST_CASE("intention: region containment, gate radius, and saturation") {
    Scene scene = base_scene();
    const IntentionEvaluator intent;

    const Pose on_surface = Pose::from_translation({0.0, 0.003, 0.0});
    const double expected = sigmoid(scene.params.c_intent * scene.params.intent_radius);
    CHECK(intent.evaluate(on_surface, scene) == doctest::Approx(expected).epsilon(1e-2));
    CHECK(intent.evaluate(on_surface, scene) > 0.95);

    // 10 cm from the nearest cloud point: the gate kills the score.
    const Pose far = Pose::from_translation({0.0, 0.103, 0.0});
    CHECK(intent.evaluate(far, scene) <= 1e-5);

    // Exactly at the gate radius: the gate contributes exactly 0.5.
    Scene tiny = scene;
    tiny.target_cloud.points = {{0.0, 0.0, 0.0}};
    tiny.target_cloud.normals = {{0.0, 0.0, 1.0}};
    const Pose at_gate = Pose::from_translation({tiny.params.gate_radius, 0.0, 0.0});
    const double base = sigmoid(tiny.params.c_intent * tiny.params.intent_radius);
    CHECK(intent.evaluate(at_gate, tiny) == doctest::Approx(0.5 * base).epsilon(1e-9));
}

TEST_CASE("intention: no matching region gives the far-field base score") {
    Scene scene = base_scene();
    scene.intent = "handover"; // regions are labeled "use"
    const IntentionEvaluator intent;
    const Pose g = Pose::from_translation({0.0, 0.003, 0.0});
    const double base = sigmoid(-scene.params.c_intent * scene.params.intent_radius);
    CHECK(intent.evaluate(g, scene) == doctest::Approx(base).epsilon(1e-6));
}

TEST_CASE("intention: requires an intent label") {
    Scene scene = base_scene();
    scene.intent.reset();
    const IntentionEvaluator intent;
    CHECK_THROWS_AS(intent.evaluate(Pose::identity(), scene), ConfigError);
}

TEST_CASE("intention: gradient matches FD and points toward the region") {
    Scene scene = base_scene();
    scene.affordance_regions[0].box.pose = Pose::from_translation({0.08, 0.0, 0.0});
    scene.affordance_regions[0].box.half_extent = {0.02, 0.02, 0.02};
    scene.params.intent_radius = 0.02;
    const IntentionEvaluator intent;

    int tested = 0;
    while (tested < 25) {
        const Pose g = random_pose_near({0.02, 0.0, 0.01}, 0.03, 1.0);
        const auto [p, grad] = intent.evaluate_with_gradient(g, scene);
        if (p < 0.02 || p > 0.98) {
            continue;
        }
        const auto fd = finite_difference_gradient(
            [&](const Pose& q) { return intent.evaluate(q, scene); }, g);
        CHECK(gradient_relative_error(grad, fd) <= 1e-4);
        ++tested;
    }

    const Pose g = Pose::from_translation({0.03, 0.0, 0.0});
    const TangentVector grad = intent.gradient(g, scene);
    const Eigen::Vector3d to_region =
        scene.affordance_regions[0].box.pose.translation - g.translation;
    CHECK(grad.head<3>().dot(to_region) > 0.0);
}

TEST_CASE("gradient_of: constant evaluator has zero gradient") {
    const Scene scene = base_scene();
    const ConstantEvaluator c(0.7);
    CHECK(gradient_of(c, straddle_grasp(), scene).norm() == 0.0);
    CHECK(c.evaluate(straddle_grasp(), scene) == 0.7);
}

TEST_CASE("registry: standard ids and lookup failures") {
    const EvaluatorRegistry reg = EvaluatorRegistry::standard();
    CHECK(reg.contains("stability"));
    CHECK(reg.contains("execution"));
    CHECK(reg.contains("collision"));
    CHECK(reg.contains("intention"));
    CHECK(!reg.contains("magic"));
    CHECK_THROWS_AS(reg.get("magic"), ConfigError);
    CHECK(reg.ids().size() == 4);
}

TEST_CASE("all evaluators stay within [0,1] on random draws") {
    Scene scene = base_scene();
    scene.obstacle_cloud = blob_cloud({0.05, 0.0, 0.05}, 0.02, 0.012);
    const EvaluatorRegistry reg = EvaluatorRegistry::standard();
    for (int i = 0; i < 120; ++i) {
        const Pose g = random_pose_near({0.0, 0.0, 0.05}, 0.3, 3.0);
        for (const auto& id : reg.ids()) {
            const double p = reg.get(id).evaluate(g, scene);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            CHECK(std::isfinite(reg.get(id).gradient(g, scene).norm()));
        }
    }
}
