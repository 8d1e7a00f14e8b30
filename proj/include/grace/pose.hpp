#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace grace {

/// 6-D tangent coordinates: translation delta (m) first, then a rotation
/// vector (rad). Parameterizes Gaussian pose perturbations and gradient steps.
using TangentVector = Eigen::Matrix<double, 6, 1>;

/// Rotation weight for se3_distance, meters per radian.
inline constexpr double kDefaultRotationWeight = 0.1;

/// Rigid transform: unit quaternion (hemisphere-normalized, scalar >= 0)
/// plus translation in meters.
struct Pose {
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();

    Pose() = default;
    Pose(const Eigen::Vector3d& t, const Eigen::Quaterniond& q);

    static Pose identity() { return Pose(); }
    static Pose from_translation(const Eigen::Vector3d& t) {
        return Pose(t, Eigen::Quaterniond::Identity());
    }
    /// Axis-angle constructor; axis need not be unit length (angle = norm).
    static Pose from_rotation_vector(const Eigen::Vector3d& omega,
                                     const Eigen::Vector3d& t = Eigen::Vector3d::Zero());

    Eigen::Matrix3d rotation_matrix() const { return rotation.toRotationMatrix(); }
    Eigen::Vector3d apply(const Eigen::Vector3d& point) const {
        return rotation * point + translation;
    }
    Eigen::Vector3d rotate(const Eigen::Vector3d& v) const { return rotation * v; }

    Pose inverse() const;

    bool approx_equal(const Pose& other, double tol = 1e-9) const;
};

/// Rigid-transform composition a * b (apply b first, then a).
Pose compose(const Pose& a, const Pose& b);

/// Quaternion exponential of a rotation vector.
Eigen::Quaterniond quat_exp(const Eigen::Vector3d& omega);

/// Rotation vector of a unit quaternion (angle in [0, pi] before sign).
Eigen::Vector3d quat_log(const Eigen::Quaterniond& q);

/// Geodesic rotation angle of q, in [0, pi].
double rotation_angle(const Eigen::Quaterniond& q);

/// Moves g by xi: translation is added in the world frame, rotation is
/// right-composed in the gripper local frame. retract(g, 0) returns g
/// bit-identically.
Pose retract(const Pose& g, const TangentVector& xi);

/// Weighted SE(3) distance: ||t_a - t_b|| + rot_weight * angle(R_a^T R_b).
/// Symmetric, zero iff the poses coincide.
double se3_distance(const Pose& a, const Pose& b,
                    double rot_weight = kDefaultRotationWeight);

/// Skew-symmetric matrix with [v]x w = v cross w.
Eigen::Matrix3d skew(const Eigen::Vector3d& v);

} // namespace grace
