#pragma once

#include <optional>
#include <vector>

#include "grace/pose.hpp"

namespace grace {

/// Points in the world frame, meters. Normals are optional; when present
/// there is one unit normal per point.
struct PointCloud {
    std::vector<Eigen::Vector3d> points;
    std::vector<Eigen::Vector3d> normals; // empty, or same length as points

    bool empty() const { return points.empty(); }
    std::size_t size() const { return points.size(); }
    bool has_normals() const { return !normals.empty(); }

    Eigen::Vector3d centroid() const;

    /// Throws DomainError if sizes are inconsistent or normals are not unit.
    void validate() const;

    /// Applies a rigid transform to points and normals.
    PointCloud transformed(const Pose& t) const;
};

/// Axis-aligned box in its own frame, placed by `pose` within a parent frame.
struct Box {
    Pose pose;
    Eigen::Vector3d half_extent = Eigen::Vector3d::Ones();

    void validate() const;
};

/// Three-box gripper decomposition: palm plus two fingers, all in the
/// gripper frame. The closing region is the volume swept between the
/// fingers; closing_axis is the direction the fingers travel when closing.
struct GripperModel {
    std::vector<Box> boxes; // exactly 3: palm, finger-, finger+
    Eigen::Vector3d closing_axis = Eigen::Vector3d::UnitY();
    Box closing_region;

    /// Parallel-jaw default: palm half-extent (0.02, 0.04, 0.02), fingers
    /// (0.01, 0.005, 0.025) at +-0.04 along the closing axis, fingertips
    /// reaching z = 0.055 in front of the gripper origin.
    static GripperModel parallel_jaw();

    void validate() const;
};

/// Mean exterior distance from the cloud to a box: the average over all
/// points of ||max(|x| - H, 0)|| with x in the box local frame. Zero only
/// if every point lies inside or on the box. `parent_pose` is the world
/// pose of the frame `box.pose` lives in.
double box_sdf(const PointCloud& cloud, const Box& box, const Pose& parent_pose);

/// Exterior distance from one world point to a box attached to a moving
/// parent pose g (box world frame = g * box.pose), together with its
/// gradient with respect to the tangent of g at zero. At kink points
/// (|x_c| = H_c) the one-sided outside derivative is used; inside the box
/// distance and gradient are zero.
struct BoxPointDistance {
    double distance = 0.0;
    TangentVector d_tangent = TangentVector::Zero();
};
BoxPointDistance box_point_distance(const Pose& g, const Box& box,
                                    const Eigen::Vector3d& world_point);

/// As box_sdf but also accumulates the mean gradient w.r.t. the parent pose
/// tangent.
BoxPointDistance box_sdf_with_gradient(const PointCloud& cloud, const Box& box,
                                       const Pose& parent_pose);

/// Exterior distance from a world point to a box fixed in the world frame,
/// with gradient w.r.t. the point.
struct PointToBox {
    double distance = 0.0;
    Eigen::Vector3d d_point = Eigen::Vector3d::Zero();
};
PointToBox point_to_box_distance(const Eigen::Vector3d& point, const Box& box);

/// Per-point normals by PCA over the k nearest neighbors (smallest
/// eigenvalue direction), oriented toward `viewpoint`. Deterministic.
/// Requires k >= 3 and a cloud with at least k points.
PointCloud estimate_normals(const PointCloud& cloud, int k,
                            const Eigen::Vector3d& viewpoint = Eigen::Vector3d(0, 0, 10.0));

} // namespace grace
