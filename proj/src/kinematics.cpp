#include "grace/kinematics.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "grace/error.hpp"
#include "grace/rng.hpp"

namespace grace {

SerialChain::SerialChain(Pose base, std::vector<RevoluteJoint> joints, Pose tool)
    : base_(base), joints_(std::move(joints)), tool_(tool) {
    if (joints_.size() < 2) {
        throw DomainError("serial chain: needs at least 2 joints");
    }
    for (std::size_t i = 0; i < joints_.size(); ++i) {
        auto& j = joints_[i];
        if (j.limit_lo > j.limit_hi) {
            throw DomainError("serial chain: joint " + std::to_string(i) +
                              " limits are not ordered");
        }
        const double norm = j.axis.norm();
        if (norm < 1e-12) {
            throw DomainError("serial chain: joint " + std::to_string(i) + " axis is zero");
        }
        j.axis /= norm;
    }
}

SerialChain SerialChain::planar_two_link(double l1, double l2) {
    RevoluteJoint j1;
    j1.origin = Pose::identity();
    j1.axis = Eigen::Vector3d::UnitZ();
    RevoluteJoint j2;
    j2.origin = Pose::from_translation({l1, 0.0, 0.0});
    j2.axis = Eigen::Vector3d::UnitZ();
    return SerialChain(Pose::identity(), {j1, j2}, Pose::from_translation({l2, 0.0, 0.0}));
}

SerialChain SerialChain::default_arm(const Pose& base) {
    // Shoulder pan/lift, elbow, forearm roll, wrist pitch/roll. Limits are
    // offset so the mid-range configuration is elbow-bent, away from the
    // stretched singularity.
    std::vector<RevoluteJoint> joints(6);
    joints[0].origin = Pose::from_translation({0.0, 0.0, 0.10});
    joints[0].axis = Eigen::Vector3d::UnitZ();
    joints[0].limit_lo = -2.9;
    joints[0].limit_hi = 2.9;

    joints[1].origin = Pose::from_translation({0.0, 0.0, 0.08});
    joints[1].axis = Eigen::Vector3d::UnitY();
    joints[1].limit_lo = -0.4;
    joints[1].limit_hi = 2.4;

    joints[2].origin = Pose::from_translation({0.0, 0.0, 0.35});
    joints[2].axis = Eigen::Vector3d::UnitY();
    joints[2].limit_lo = -2.9;
    joints[2].limit_hi = 0.9;

    joints[3].origin = Pose::from_translation({0.0, 0.0, 0.08});
    joints[3].axis = Eigen::Vector3d::UnitZ();
    joints[3].limit_lo = -2.9;
    joints[3].limit_hi = 2.9;

    joints[4].origin = Pose::from_translation({0.0, 0.0, 0.30});
    joints[4].axis = Eigen::Vector3d::UnitY();
    joints[4].limit_lo = -0.9;
    joints[4].limit_hi = 2.9;

    joints[5].origin = Pose::from_translation({0.0, 0.0, 0.06});
    joints[5].axis = Eigen::Vector3d::UnitZ();
    joints[5].limit_lo = -2.9;
    joints[5].limit_hi = 2.9;

    return SerialChain(base, std::move(joints), Pose::from_translation({0.0, 0.0, 0.10}));
}

Eigen::VectorXd SerialChain::mid_range() const {
    Eigen::VectorXd theta(dof());
    for (int i = 0; i < dof(); ++i) {
        theta[i] = 0.5 * (joints_[i].limit_lo + joints_[i].limit_hi);
    }
    return theta;
}

Eigen::VectorXd SerialChain::clamp_to_limits(Eigen::VectorXd theta) const {
    for (int i = 0; i < dof(); ++i) {
        theta[i] = std::clamp(theta[i], joints_[i].limit_lo, joints_[i].limit_hi);
    }
    return theta;
}

namespace {

void check_dim(const SerialChain& chain, const Eigen::VectorXd& theta) {
    if (theta.size() != chain.dof()) {
        throw DomainError("kinematics: joint vector length " + std::to_string(theta.size()) +
                          " does not match chain dof " + std::to_string(chain.dof()));
    }
}

} // namespace

Pose forward_kinematics(const SerialChain& chain, const Eigen::VectorXd& theta) {
    check_dim(chain, theta);
    Pose current = chain.base();
    for (int i = 0; i < chain.dof(); ++i) {
        const auto& joint = chain.joints()[i];
        current = compose(current, joint.origin);
        current = compose(current, Pose::from_rotation_vector(joint.axis * theta[i]));
    }
    return compose(current, chain.tool());
}

Eigen::MatrixXd jacobian(const SerialChain& chain, const Eigen::VectorXd& theta) {
    check_dim(chain, theta);
    const int d = chain.dof();
    std::vector<Eigen::Vector3d> axes(d);
    std::vector<Eigen::Vector3d> origins(d);
    Pose current = chain.base();
    for (int i = 0; i < d; ++i) {
        const auto& joint = chain.joints()[i];
        current = compose(current, joint.origin);
        axes[i] = current.rotate(joint.axis);
        origins[i] = current.translation;
        current = compose(current, Pose::from_rotation_vector(joint.axis * theta[i]));
    }
    const Eigen::Vector3d tip = compose(current, chain.tool()).translation;
    Eigen::MatrixXd jac(6, d);
    for (int i = 0; i < d; ++i) {
        jac.block<3, 1>(0, i) = axes[i].cross(tip - origins[i]);
        jac.block<3, 1>(3, i) = axes[i];
    }
    return jac;
}

double manipulability(const SerialChain& chain, const Eigen::VectorXd& theta) {
    const Eigen::MatrixXd jac = jacobian(chain, theta);
    Eigen::MatrixXd block;
    if (chain.dof() < 6) {
        block = jac.topRows(3);
    } else {
        block = jac;
    }
    // Product of singular values; more accurate near singularities than
    // forming the Gram determinant.
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
    const auto& sv = svd.singularValues();
    const int rank_dim = static_cast<int>(std::min(block.rows(), block.cols()));
    double product = 1.0;
    for (int i = 0; i < rank_dim; ++i) {
        product *= sv[i];
    }
    return std::abs(product);
}

namespace {

/// One damped-least-squares descent run. Rotation rows are scaled by the
/// same weight se3_distance uses so the descent direction matches the
/// convergence metric; the damping is raised temporarily whenever a step
/// fails to reduce the error.
void dls_descend(const SerialChain& chain, const Pose& target, Eigen::VectorXd theta,
                 const IkOptions& options, IkResult& result, double& best_err) {
    const double w = options.rot_weight;
    theta = chain.clamp_to_limits(std::move(theta));
    Pose pose = forward_kinematics(chain, theta);
    double err = se3_distance(target, pose, options.rot_weight);
    if (err < best_err) {
        best_err = err;
        result.theta = theta;
        result.pose = pose;
    }

    double damping = options.damping;
    int since_improvement = 0;
    for (int iter = 0; iter < options.max_iterations && best_err >= options.tolerance;
         ++iter) {
        Eigen::Matrix<double, 6, 1> error;
        error.head<3>() = target.translation - pose.translation;
        error.tail<3>() = w * quat_log(target.rotation * pose.rotation.conjugate());

        Eigen::MatrixXd jac = jacobian(chain, theta);
        jac.bottomRows(3) *= w;
        const Eigen::Matrix<double, 6, 6> gram =
            jac * jac.transpose() + damping * damping * Eigen::Matrix<double, 6, 6>::Identity();
        Eigen::VectorXd step = jac.transpose() * gram.ldlt().solve(error);
        const double step_norm = step.norm();
        if (step_norm > options.max_step) {
            step *= options.max_step / step_norm;
        }

        const Eigen::VectorXd candidate = chain.clamp_to_limits(theta + step);
        const Pose candidate_pose = forward_kinematics(chain, candidate);
        const double candidate_err = se3_distance(target, candidate_pose, options.rot_weight);
        result.iterations += 1;

        if (candidate_err < err) {
            theta = candidate;
            pose = candidate_pose;
            err = candidate_err;
            damping = std::max(options.damping, 0.5 * damping);
        } else {
            damping = std::min(1e2, 4.0 * damping);
        }
        if (err < best_err - 1e-12) {
            best_err = err;
            result.theta = theta;
            result.pose = pose;
            since_improvement = 0;
        } else if (++since_improvement >= options.stall_iterations) {
            break;
        }
        if (step_norm < 1e-12) {
            break;
        }
    }
}

} // namespace

IkResult solve_ik(const SerialChain& chain, const Pose& target, const Eigen::VectorXd& theta0,
                  const IkOptions& options) {
    check_dim(chain, theta0);

    IkResult result;
    result.theta = chain.clamp_to_limits(theta0);
    result.pose = forward_kinematics(chain, result.theta);
    double best_err = se3_distance(target, result.pose, options.rot_weight);
    if (best_err < options.tolerance) {
        return IkResult{result.theta, result.pose, true, 0};
    }

    dls_descend(chain, target, result.theta, options, result, best_err);

    // Deterministic interior restarts pull the solver out of orientation
    // local minima; the first configuration that converges wins.
    Prng restart_rng(0x1c4a11u);
    for (int r = 0; r < options.restarts && best_err >= options.tolerance; ++r) {
        Eigen::VectorXd seed(chain.dof());
        for (int i = 0; i < chain.dof(); ++i) {
            const auto& joint = chain.joints()[i];
            seed[i] = joint.limit_lo +
                      (joint.limit_hi - joint.limit_lo) * restart_rng.uniform(0.1, 0.9);
        }
        dls_descend(chain, target, seed, options, result, best_err);
    }
    result.converged = best_err < options.tolerance;
    return result;
}

} // namespace grace
