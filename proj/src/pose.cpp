#include "grace/pose.hpp"

#include <cmath>

namespace grace {

namespace {

Eigen::Quaterniond hemisphere(Eigen::Quaterniond q) {
    if (q.w() < 0.0) {
        q.coeffs() = -q.coeffs();
    }
    return q;
}

} // namespace

Pose::Pose(const Eigen::Vector3d& t, const Eigen::Quaterniond& q)
    : translation(t), rotation(hemisphere(q.normalized())) {}

Pose Pose::from_rotation_vector(const Eigen::Vector3d& omega, const Eigen::Vector3d& t) {
    return Pose(t, quat_exp(omega));
}

Pose Pose::inverse() const {
    const Eigen::Quaterniond inv_q = rotation.conjugate();
    return Pose(-(inv_q * translation), inv_q);
}

bool Pose::approx_equal(const Pose& other, double tol) const {
    return se3_distance(*this, other, 1.0) <= tol;
}

Pose compose(const Pose& a, const Pose& b) {
    return Pose(a.rotation * b.translation + a.translation, a.rotation * b.rotation);
}

Eigen::Quaterniond quat_exp(const Eigen::Vector3d& omega) {
    const double theta = omega.norm();
    double scale;
    if (theta < 1e-8) {
        scale = 0.5 - theta * theta / 48.0;
    } else {
        scale = std::sin(0.5 * theta) / theta;
    }
    Eigen::Quaterniond q;
    q.w() = std::cos(0.5 * theta);
    q.vec() = scale * omega;
    return q;
}

Eigen::Vector3d quat_log(const Eigen::Quaterniond& q_in) {
    Eigen::Quaterniond q = q_in;
    if (q.w() < 0.0) {
        q.coeffs() = -q.coeffs();
    }
    const double vnorm = q.vec().norm();
    if (vnorm < 1e-12) {
        return 2.0 * q.vec();
    }
    const double angle = 2.0 * std::atan2(vnorm, q.w());
    return (angle / vnorm) * q.vec();
}

double rotation_angle(const Eigen::Quaterniond& q) {
    return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
}

Pose retract(const Pose& g, const TangentVector& xi) {
    if ((xi.array() == 0.0).all()) {
        return g;
    }
    const Eigen::Vector3d dt = xi.head<3>();
    const Eigen::Vector3d domega = xi.tail<3>();
    return Pose(g.translation + dt, g.rotation * quat_exp(domega));
}

double se3_distance(const Pose& a, const Pose& b, double rot_weight) {
    const double dt = (a.translation - b.translation).norm();
    const double dr = rotation_angle(a.rotation.conjugate() * b.rotation);
    return dt + rot_weight * dr;
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
    Eigen::Matrix3d m;
    m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return m;
}

} // namespace grace
