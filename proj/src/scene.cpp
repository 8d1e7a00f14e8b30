#include "grace/scene.hpp"

#include <algorithm>

#include "grace/error.hpp"

namespace grace {

void ClassifierParams::validate() const {
    const std::pair<const char*, double> scales[] = {
        {"c_manip", c_manip},         {"c_omega", c_omega},
        {"c_collision", c_collision}, {"c_stability", c_stability},
        {"c_intent", c_intent},       {"sigma_region", sigma_region},
        {"c_gate", c_gate},           {"rot_weight", rot_weight},
    };
    for (const auto& [name, value] : scales) {
        if (!(value > 0.0)) {
            throw ConfigError(std::string("params.") + name + ": must be positive");
        }
    }
    const std::pair<const char*, double> thresholds[] = {
        {"omega_threshold", omega_threshold},
        {"sdf_threshold", sdf_threshold},
        {"intent_radius", intent_radius},
        {"eps_pose", eps_pose},
        {"gate_radius", gate_radius},
    };
    for (const auto& [name, value] : thresholds) {
        if (!(value >= 0.0)) {
            throw ConfigError(std::string("params.") + name + ": must be non-negative");
        }
    }
}

void AffordanceRegion::validate() const {
    box.validate();
    if (intents.empty()) {
        throw ConfigError("affordance_region.intents: must not be empty");
    }
}

RuleHierarchy Scene::hierarchy() const {
    if (hierarchy_config.empty()) {
        return RuleHierarchy::standard();
    }
    return RuleHierarchy(hierarchy_config);
}

void Scene::validate(const std::vector<std::string>& known_criteria) const {
    if (target_cloud.empty()) {
        throw ConfigError("scene.target_cloud: must not be empty");
    }
    target_cloud.validate();
    obstacle_cloud.validate();
    gripper.validate();
    params.validate();
    for (const auto& region : affordance_regions) {
        region.validate();
    }

    const RuleHierarchy h = hierarchy();
    bool uses_execution = false;
    bool uses_intention = false;
    for (int i = 0; i < h.size(); ++i) {
        const auto& rule = h.rules()[i];
        for (std::size_t j = 0; j < rule.criteria.size(); ++j) {
            const auto& id = rule.criteria[j];
            if (std::find(known_criteria.begin(), known_criteria.end(), id) ==
                known_criteria.end()) {
                throw ConfigError("scene.hierarchy[" + std::to_string(i) + "][" +
                                  std::to_string(j) + "]: unknown criterion id \"" + id + "\"");
            }
            uses_execution = uses_execution || id == "execution";
            uses_intention = uses_intention || id == "intention";
        }
    }
    if (uses_execution && !chain.has_value()) {
        throw ConfigError("scene.chain: required because the hierarchy uses \"execution\"");
    }
    if (uses_intention && !intent.has_value()) {
        throw ConfigError("scene.intent: required because the hierarchy uses \"intention\"");
    }
}

} // namespace grace
