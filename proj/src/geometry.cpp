#include "grace/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "grace/error.hpp"

namespace grace {

Eigen::Vector3d PointCloud::centroid() const {
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (const auto& p : points) {
        c += p;
    }
    return points.empty() ? c : Eigen::Vector3d(c / static_cast<double>(points.size()));
}

void PointCloud::validate() const {
    if (!normals.empty() && normals.size() != points.size()) {
        throw DomainError("point cloud: normals count " + std::to_string(normals.size()) +
                          " does not match point count " + std::to_string(points.size()));
    }
    for (std::size_t i = 0; i < normals.size(); ++i) {
        if (std::abs(normals[i].norm() - 1.0) > 1e-6) {
            throw DomainError("point cloud: normal " + std::to_string(i) + " is not unit length");
        }
    }
}

PointCloud PointCloud::transformed(const Pose& t) const {
    PointCloud out;
    out.points.reserve(points.size());
    for (const auto& p : points) {
        out.points.push_back(t.apply(p));
    }
    out.normals.reserve(normals.size());
    for (const auto& n : normals) {
        out.normals.push_back(t.rotate(n));
    }
    return out;
}

void Box::validate() const {
    if (!(half_extent.array() > 0.0).all()) {
        throw DomainError("box: half extents must be positive");
    }
}

GripperModel GripperModel::parallel_jaw() {
    GripperModel g;
    g.closing_axis = Eigen::Vector3d::UnitY();
    Box palm;
    palm.pose = Pose::from_translation({0.0, 0.0, -0.015});
    palm.half_extent = {0.02, 0.04, 0.02};
    Box finger_neg;
    finger_neg.pose = Pose::from_translation({0.0, -0.04, 0.03});
    finger_neg.half_extent = {0.01, 0.005, 0.025};
    Box finger_pos;
    finger_pos.pose = Pose::from_translation({0.0, 0.04, 0.03});
    finger_pos.half_extent = {0.01, 0.005, 0.025};
    g.boxes = {palm, finger_neg, finger_pos};
    g.closing_region.pose = Pose::from_translation({0.0, 0.0, 0.03});
    g.closing_region.half_extent = {0.01, 0.035, 0.025};
    return g;
}

void GripperModel::validate() const {
    if (boxes.size() != 3) {
        throw DomainError("gripper: expected exactly 3 boxes, got " +
                          std::to_string(boxes.size()));
    }
    for (const auto& b : boxes) {
        b.validate();
    }
    closing_region.validate();
    if (std::abs(closing_axis.norm() - 1.0) > 1e-9) {
        throw DomainError("gripper: closing axis must be unit length");
    }
}

namespace {

/// Exterior distance of a local-frame point and the hinge direction
/// d dist / d local, zero inside the box.
double local_box_distance(const Eigen::Vector3d& local, const Eigen::Vector3d& half_extent,
                          Eigen::Vector3d* d_local) {
    const Eigen::Vector3d excess = local.cwiseAbs() - half_extent;
    const Eigen::Vector3d outside = excess.cwiseMax(0.0);
    const double dist = outside.norm();
    if (d_local) {
        d_local->setZero();
        if (dist > 0.0) {
            for (int c = 0; c < 3; ++c) {
                if (outside[c] > 0.0) {
                    (*d_local)[c] = (local[c] > 0.0 ? 1.0 : -1.0) * outside[c] / dist;
                }
            }
        }
    }
    return dist;
}

} // namespace

double box_sdf(const PointCloud& cloud, const Box& box, const Pose& parent_pose) {
    if (cloud.empty()) {
        throw DomainError("box_sdf: point cloud is empty");
    }
    const Pose world_box = compose(parent_pose, box.pose);
    const Pose to_local = world_box.inverse();
    double sum = 0.0;
    for (const auto& p : cloud.points) {
        sum += local_box_distance(to_local.apply(p), box.half_extent, nullptr);
    }
    return sum / static_cast<double>(cloud.size());
}

BoxPointDistance box_point_distance(const Pose& g, const Box& box,
                                    const Eigen::Vector3d& world_point) {
    // local = B_R^T (R^T (x - t) - B_t); the tangent of g adds dt in the
    // world frame and right-composes the rotation, so
    //   d local / d dt     = -B_R^T R^T
    //   d local / d domega =  B_R^T [v]x   with v = R^T (x - t).
    BoxPointDistance out;
    const Eigen::Matrix3d r_t = g.rotation.toRotationMatrix().transpose();
    const Eigen::Matrix3d box_r_t = box.pose.rotation.toRotationMatrix().transpose();
    const Eigen::Vector3d v = r_t * (world_point - g.translation);
    const Eigen::Vector3d local = box_r_t * (v - box.pose.translation);
    Eigen::Vector3d d_local;
    out.distance = local_box_distance(local, box.half_extent, &d_local);
    if (out.distance > 0.0) {
        out.d_tangent.head<3>() = -(box_r_t * r_t).transpose() * d_local;
        out.d_tangent.tail<3>() = (box_r_t * skew(v)).transpose() * d_local;
    }
    return out;
}

BoxPointDistance box_sdf_with_gradient(const PointCloud& cloud, const Box& box,
                                       const Pose& parent_pose) {
    if (cloud.empty()) {
        throw DomainError("box_sdf: point cloud is empty");
    }
    BoxPointDistance acc;
    for (const auto& p : cloud.points) {
        const BoxPointDistance one = box_point_distance(parent_pose, box, p);
        acc.distance += one.distance;
        acc.d_tangent += one.d_tangent;
    }
    const double inv = 1.0 / static_cast<double>(cloud.size());
    acc.distance *= inv;
    acc.d_tangent *= inv;
    return acc;
}

PointToBox point_to_box_distance(const Eigen::Vector3d& point, const Box& box) {
    PointToBox out;
    const Pose to_local = box.pose.inverse();
    const Eigen::Vector3d local = to_local.apply(point);
    Eigen::Vector3d d_local;
    out.distance = local_box_distance(local, box.half_extent, &d_local);
    if (out.distance > 0.0) {
        out.d_point = box.pose.rotation.toRotationMatrix() * d_local;
    }
    return out;
}

PointCloud estimate_normals(const PointCloud& cloud, int k, const Eigen::Vector3d& viewpoint) {
    if (k < 3) {
        throw DomainError("estimate_normals: k must be >= 3");
    }
    if (static_cast<int>(cloud.size()) < k) {
        throw DomainError("estimate_normals: cloud has " + std::to_string(cloud.size()) +
                          " points, need at least k = " + std::to_string(k));
    }
    const auto& pts = cloud.points;
    const std::size_t n = pts.size();
    PointCloud out;
    out.points = pts;
    out.normals.resize(n);

    std::vector<std::pair<double, std::size_t>> dists(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            dists[j] = {(pts[j] - pts[i]).squaredNorm(), j};
        }
        std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
        Eigen::Vector3d mean = Eigen::Vector3d::Zero();
        for (int j = 0; j < k; ++j) {
            mean += pts[dists[j].second];
        }
        mean /= static_cast<double>(k);
        Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
        for (int j = 0; j < k; ++j) {
            const Eigen::Vector3d d = pts[dists[j].second] - mean;
            cov += d * d.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
        Eigen::Vector3d normal = eig.eigenvectors().col(0); // smallest eigenvalue
        if (normal.dot(viewpoint - pts[i]) < 0.0) {
            normal = -normal;
        }
        out.normals[i] = normal.normalized();
    }
    return out;
}

} // namespace grace
