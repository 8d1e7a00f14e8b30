#pragma once

#include <vector>

#include "grace/pose.hpp"

namespace grace {

/// One revolute joint: a fixed transform from the parent link frame,
/// followed by rotation about `axis` (unit, in the post-origin frame).
struct RevoluteJoint {
    Pose origin;
    Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
    double limit_lo = -3.14159265358979323846;
    double limit_hi = 3.14159265358979323846;
};

/// Revolute serial chain: base pose, joints, and a fixed tool transform
/// after the last joint. Immutable after construction.
class SerialChain {
public:
    SerialChain(Pose base, std::vector<RevoluteJoint> joints, Pose tool);

    /// Two-revolute planar arm in the x-y plane (axes +z), links along +x.
    static SerialChain planar_two_link(double l1, double l2);

    /// Six-joint elbow arm with ~0.8 m reach used by the synthetic scenes.
    static SerialChain default_arm(const Pose& base = Pose::identity());

    int dof() const { return static_cast<int>(joints_.size()); }
    const std::vector<RevoluteJoint>& joints() const { return joints_; }
    const Pose& base() const { return base_; }
    const Pose& tool() const { return tool_; }

    /// Joint vector at the middle of each joint's limits.
    Eigen::VectorXd mid_range() const;

    Eigen::VectorXd clamp_to_limits(Eigen::VectorXd theta) const;

private:
    Pose base_;
    std::vector<RevoluteJoint> joints_;
    Pose tool_;
};

/// End-effector pose for the given joint vector (length must equal dof).
Pose forward_kinematics(const SerialChain& chain, const Eigen::VectorXd& theta);

/// Geometric Jacobian in the base frame, 6 x D: linear velocity rows first,
/// then angular velocity rows.
Eigen::MatrixXd jacobian(const SerialChain& chain, const Eigen::VectorXd& theta);

/// Manipulability: the product of singular values of the task Jacobian
/// block (equivalently sqrt(det(J J^T)) on full-rank blocks). For chains
/// with fewer than 6 joints the position rows are used, since the full
/// 6-row Gram determinant is identically zero there.
double manipulability(const SerialChain& chain, const Eigen::VectorXd& theta);

struct IkResult {
    Eigen::VectorXd theta;
    Pose pose;       ///< forward kinematics of theta
    bool converged = false;
    int iterations = 0;
};

struct IkOptions {
    double damping = 1e-2;
    int max_iterations = 200;
    double tolerance = 1e-4;   ///< se3_distance threshold
    double rot_weight = kDefaultRotationWeight;
    double max_step = 0.8;     ///< joint-space step clamp, radians
    int stall_iterations = 20; ///< stop early when the best error stops improving
    int restarts = 12;         ///< deterministic interior reseeds after a stall
};

/// Damped-least-squares IK with joint limits enforced by clamping each
/// step. Returns the best iterate whether or not it converged.
IkResult solve_ik(const SerialChain& chain, const Pose& target, const Eigen::VectorXd& theta0,
                  const IkOptions& options = IkOptions());

} // namespace grace
