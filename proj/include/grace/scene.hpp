#pragma once

#include <optional>
#include <string>
#include <vector>

#include "grace/geometry.hpp"
#include "grace/hierarchy.hpp"
#include "grace/kinematics.hpp"
#include "grace/params.hpp"

namespace grace {

/// Everything a criterion evaluator may observe: the segmented target
/// cloud, the remaining obstacle cloud, gripper and arm models, affordance
/// regions, the requested intent, classifier parameters, and the rule
/// hierarchy. Immutable once built; safe to share across threads.
struct Scene {
    std::string name;
    PointCloud target_cloud;
    PointCloud obstacle_cloud;
    GripperModel gripper = GripperModel::parallel_jaw();
    std::optional<SerialChain> chain;
    std::vector<AffordanceRegion> affordance_regions;
    std::optional<std::string> intent;
    ClassifierParams params;
    std::vector<std::vector<std::string>> hierarchy_config; // criterion ids per rule

    /// Hierarchy built from hierarchy_config (or the standard ranking when
    /// the config is empty).
    RuleHierarchy hierarchy() const;

    /// Checks invariants and cross-field consistency; throws ConfigError
    /// naming the offending field. `known_criteria` lists registered
    /// evaluator identifiers.
    void validate(const std::vector<std::string>& known_criteria) const;
};

} // namespace grace
