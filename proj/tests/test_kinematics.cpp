#include "grace/kinematics.hpp"

#include <cmath>

#include "doctest.h"
#include "grace/error.hpp"
#include "grace/rng.hpp"

using namespace grace;

namespace {

Eigen::VectorXd joints2(double a, double b) {
    Eigen::VectorXd theta(2);
    theta << a, b;
    return theta;
}

/// Finite-difference geometric Jacobian: position rows from translations,
/// angular rows from the world-frame rotation increment.
Eigen::MatrixXd fd_jacobian(const SerialChain& chain, const Eigen::VectorXd& theta,
                            double h = 1e-6) {
    Eigen::MatrixXd jac(6, theta.size());
    for (int j = 0; j < theta.size(); ++j) {
        Eigen::VectorXd tp = theta;
        tp[j] += h;
        Eigen::VectorXd tm = theta;
        tm[j] -= h;
        const Pose fp = forward_kinematics(chain, tp);
        const Pose fm = forward_kinematics(chain, tm);
        jac.block<3, 1>(0, j) = (fp.translation - fm.translation) / (2.0 * h);
        const Eigen::Quaterniond dq = fp.rotation * fm.rotation.conjugate();
        jac.block<3, 1>(3, j) = quat_log(dq) / (2.0 * h);
    }
    return jac;
}

} // namespace

TEST_CASE("forward kinematics: planar two-link") {
    const SerialChain chain = SerialChain::planar_two_link(1.0, 1.0);
    CHECK(forward_kinematics(chain, joints2(0, 0))
              .translation.isApprox(Eigen::Vector3d(2, 0, 0), 1e-12));
    CHECK(forward_kinematics(chain, joints2(M_PI / 2, 0))
              .translation.isApprox(Eigen::Vector3d(0, 2, 0), 1e-9));
    const SerialChain degenerate = SerialChain::planar_two_link(0.0, 0.0);
    CHECK(forward_kinematics(degenerate, joints2(0.7, -0.3)).translation.norm() <= 1e-12);
    CHECK_THROWS_AS(forward_kinematics(chain, Eigen::VectorXd::Zero(3)), DomainError);
}

TEST_CASE("jacobian: planar closed form") {
    const SerialChain chain = SerialChain::planar_two_link(1.0, 1.0);
    const Eigen::MatrixXd jac = jacobian(chain, joints2(0, M_PI / 2));
    CHECK(jac(0, 0) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(jac(0, 1) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(jac(1, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(jac(1, 1) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::isfinite(jac.norm()));
}

TEST_CASE("jacobian: matches finite differences") {
    Prng rng(21);
    const SerialChain planar = SerialChain::planar_two_link(0.8, 1.3);
    const SerialChain arm = SerialChain::default_arm();
    for (int trial = 0; trial < 25; ++trial) {
        {
            Eigen::VectorXd theta(2);
            theta << rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5);
            const double err =
                (jacobian(planar, theta) - fd_jacobian(planar, theta)).cwiseAbs().maxCoeff();
            CHECK(err <= 1e-5);
        }
        {
            Eigen::VectorXd theta(6);
            for (int i = 0; i < 6; ++i) {
                theta[i] = rng.uniform(-1.5, 1.5);
            }
            const double err =
                (jacobian(arm, theta) - fd_jacobian(arm, theta)).cwiseAbs().maxCoeff();
            CHECK(err <= 1e-5);
        }
    }
}

TEST_CASE("manipulability: planar closed form |l1 l2 sin(theta2)|") {
    const SerialChain chain = SerialChain::planar_two_link(1.0, 1.0);
    CHECK(manipulability(chain, joints2(0.3, M_PI / 2)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(manipulability(chain, joints2(0.9, 0.0)) <= 1e-9);
    CHECK(manipulability(chain, joints2(-0.4, M_PI / 6)) ==
          doctest::Approx(0.5).epsilon(1e-9));
    for (int i = 0; i < 100; ++i) {
        const double theta2 = -M_PI + 2.0 * M_PI * i / 99.0;
        const double omega = manipulability(chain, joints2(0.17, theta2));
        CHECK(std::abs(omega - std::abs(std::sin(theta2))) <= 1e-9);
    }
}

TEST_CASE("manipulability: six-joint arm is positive away from singularities") {
    const SerialChain arm = SerialChain::default_arm();
    const double omega = manipulability(arm, arm.mid_range());
    CHECK(omega > 0.0);
    CHECK(std::isfinite(omega));
}

TEST_CASE("solve_ik: reachable target round trip") {
    const SerialChain chain = SerialChain::planar_two_link(1.0, 1.0);
    const Pose target = forward_kinematics(chain, joints2(0.4, M_PI / 2));
    const IkResult result = solve_ik(chain, target, joints2(0.2, 1.2));
    CHECK(result.converged);
    CHECK(se3_distance(result.pose, target) < 1e-4);
}

TEST_CASE("solve_ik: unreachable target reports non-convergence") {
    const SerialChain chain = SerialChain::planar_two_link(1.0, 1.0);
    const Pose target = Pose::from_translation({10.0, 0.0, 0.0});
    const IkResult result = solve_ik(chain, target, joints2(0.1, 0.5));
    CHECK(!result.converged);
    CHECK(se3_distance(result.pose, target) > 1.0);
}

TEST_CASE("solve_ik: exact seed converges without iterating") {
    const SerialChain chain = SerialChain::planar_two_link(1.0, 1.0);
    const Eigen::VectorXd theta = joints2(0.3, 0.9);
    const Pose target = forward_kinematics(chain, theta);
    const IkResult result = solve_ik(chain, target, theta);
    CHECK(result.converged);
    CHECK(result.iterations == 0);
    CHECK(result.theta == theta);
}

TEST_CASE("solve_ik: random reachable targets on the arm") {
    const SerialChain arm = SerialChain::default_arm();
    Prng rng(31);
    int converged = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd theta(6);
        for (int i = 0; i < 6; ++i) {
            const auto& joint = arm.joints()[i];
            theta[i] = rng.uniform(joint.limit_lo, joint.limit_hi);
        }
        const Pose target = forward_kinematics(arm, theta);
        if (solve_ik(arm, target, arm.mid_range()).converged) {
            ++converged;
        }
    }
    // 95% success over reachable targets (seed fixed).
    CHECK(converged >= 190);
}

TEST_CASE("serial chain: joint limit clamping and validation") {
    CHECK_THROWS_AS(SerialChain(Pose::identity(), {RevoluteJoint{}}, Pose::identity()),
                    DomainError);
    const SerialChain arm = SerialChain::default_arm();
    Eigen::VectorXd wild(6);
    wild << 10, -10, 10, -10, 10, -10;
    const Eigen::VectorXd clamped = arm.clamp_to_limits(wild);
    for (int i = 0; i < 6; ++i) {
        CHECK(clamped[i] >= arm.joints()[i].limit_lo);
        CHECK(clamped[i] <= arm.joints()[i].limit_hi);
    }
}
