#pragma once

#include <string>
#include <vector>

#include "grace/geometry.hpp"

namespace grace {

/// Scale coefficients and thresholds for the criterion classifiers. The
/// values below are defaults chosen so the sigmoids transition over
/// physically plausible desk-scale distances; scenes may override any of
/// them.
struct ClassifierParams {
    double c_manip = 5.0;        ///< C_m: pose-mismatch scale (execution)
    double c_omega = 50.0;       ///< C_w: manipulability scale (execution)
    double c_collision = 100.0;  ///< C_c: mean-SDF scale (collision)
    double c_stability = 5.0;    ///< C_s: alignment-score scale (stability)
    double c_intent = 100.0;     ///< C_n: region-distance scale (intention)
    double omega_threshold = 0.05;   ///< minimum safe manipulability
    double sdf_threshold = 0.02;     ///< d_th, meters
    double stability_threshold = 1.0;///< tau_s, alignment score offset
    double intent_radius = 0.05;     ///< rho_th, meters
    double sigma_region = 0.01;      ///< closing-region membership falloff, meters
    double eps_pose = 1e-3;          ///< IK pose-match tolerance (se3_distance units)
    double gate_radius = 0.03;       ///< cloud-proximity gate, meters
    double c_gate = 200.0;           ///< gate sharpness
    double rot_weight = kDefaultRotationWeight; ///< se3_distance rotation weight
    /// Restores the printed sigmoid argument C_c (d_th - dbar); the default
    /// C_c (dbar - d_th) makes larger clearance mean higher probability.
    bool literal_collision_sign = false;
    /// Include the target object's own points in the collision cloud.
    bool collide_with_target = false;

    void validate() const;
};

/// A labeled world-frame box; grasps near it score high on the matching
/// intents.
struct AffordanceRegion {
    Box box;
    std::vector<std::string> intents;

    void validate() const;
};

} // namespace grace
