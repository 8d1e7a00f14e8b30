#include <cmath>

#include "grace/error.hpp"
#include "grace/rng.hpp"
#include "grace/scene_io.hpp"

namespace grace {

namespace {

// All synthetic scenes live near the origin at desk scale; the arm base
// sits behind the workspace.
const Eigen::Vector3d kArmBase(-0.45, 0.0, -0.10);

/// Grid helper with a small deterministic tangential jitter so different
/// scene seeds give slightly different clouds.
class CloudBuilder {
public:
    explicit CloudBuilder(std::uint64_t seed) : rng_(derive_seed(seed, 0xc10d)) {}

    PointCloud take() { return std::move(cloud_); }

    /// Vertical plate: two faces at y = +-half_thickness with normals +-y,
    /// plus a top-edge row with normals +z.
    void add_plate(double x_lo, double x_hi, double half_thickness, double z_lo, double z_hi,
                   double spacing, double jitter) {
        for (double x = x_lo; x <= x_hi + 1e-12; x += spacing) {
            for (double z = z_lo; z <= z_hi + 1e-12; z += spacing) {
                for (double side : {-1.0, 1.0}) {
                    const double jx = jitter * rng_.uniform(-1.0, 1.0);
                    const double jz = jitter * rng_.uniform(-1.0, 1.0);
                    push(Eigen::Vector3d(clampd(x + jx, x_lo, x_hi), side * half_thickness,
                                         clampd(z + jz, z_lo, z_hi)),
                         Eigen::Vector3d(0.0, side, 0.0));
                }
            }
        }
        for (double x = x_lo; x <= x_hi + 1e-12; x += spacing) {
            const double jx = jitter * rng_.uniform(-1.0, 1.0);
            push(Eigen::Vector3d(clampd(x + jx, x_lo, x_hi), 0.0, z_hi),
                 Eigen::Vector3d(0.0, 0.0, 1.0));
        }
    }

    /// Solid block sampled on a volume grid (no normals).
    void add_block(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi, double spacing,
                   double jitter) {
        for (double x = lo.x(); x <= hi.x() + 1e-12; x += spacing) {
            for (double y = lo.y(); y <= hi.y() + 1e-12; y += spacing) {
                for (double z = lo.z(); z <= hi.z() + 1e-12; z += spacing) {
                    Eigen::Vector3d p(x, y, z);
                    for (int c = 0; c < 3; ++c) {
                        p[c] = clampd(p[c] + jitter * rng_.uniform(-1.0, 1.0), lo[c], hi[c]);
                    }
                    push(p, std::nullopt);
                }
            }
        }
    }

    /// Sphere surface on a Fibonacci lattice, outward normals.
    void add_sphere(const Eigen::Vector3d& center, double radius, int count) {
        const double golden = M_PI * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < count; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * i;
            const Eigen::Vector3d n(r * std::cos(phi), r * std::sin(phi), z);
            push(center + radius * n, n);
        }
    }

    /// Vertical cylinder side surface with radial normals, plus a small top
    /// cap with +z normals.
    void add_stick(const Eigen::Vector3d& base, double radius, double height, int azimuths,
                   double z_spacing) {
        for (double z = 0.0; z <= height + 1e-12; z += z_spacing) {
            for (int a = 0; a < azimuths; ++a) {
                const double phi = 2.0 * M_PI * a / azimuths + rng_.uniform(0.0, 0.1);
                const Eigen::Vector3d n(std::cos(phi), std::sin(phi), 0.0);
                push(base + Eigen::Vector3d(radius * n.x(), radius * n.y(), z), n);
            }
        }
        for (int a = 0; a < azimuths / 2; ++a) {
            const double phi = 2.0 * M_PI * a / (azimuths / 2);
            push(base + Eigen::Vector3d(0.5 * radius * std::cos(phi),
                                        0.5 * radius * std::sin(phi), height),
                 Eigen::Vector3d(0.0, 0.0, 1.0));
        }
    }

    /// Horizontal ring (torus surface) around a vertical axis.
    void add_ring(const Eigen::Vector3d& center, double major_radius, double tube_radius,
                  int major_count, int tube_count) {
        for (int a = 0; a < major_count; ++a) {
            const double phi = 2.0 * M_PI * a / major_count;
            const Eigen::Vector3d radial(std::cos(phi), std::sin(phi), 0.0);
            for (int b = 0; b < tube_count; ++b) {
                const double psi = 2.0 * M_PI * b / tube_count;
                const Eigen::Vector3d p = center + (major_radius + tube_radius * std::cos(psi)) * radial +
                                          Eigen::Vector3d(0, 0, tube_radius * std::sin(psi));
                push(p, std::nullopt);
            }
        }
    }

private:
    static double clampd(double v, double lo, double hi) {
        return std::min(std::max(v, lo), hi);
    }

    void push(const Eigen::Vector3d& p, const std::optional<Eigen::Vector3d>& n) {
        cloud_.points.push_back(p);
        if (n.has_value()) {
            cloud_.normals.push_back(n->normalized());
        }
    }

    PointCloud cloud_;
    Prng rng_;
};

AffordanceRegion region_at(const Eigen::Vector3d& center, const Eigen::Vector3d& half,
                           std::vector<std::string> intents) {
    AffordanceRegion region;
    region.box.pose = Pose::from_translation(center);
    region.box.half_extent = half;
    region.intents = std::move(intents);
    return region;
}

// --- slot ------------------------------------------------------------------
// A plate whose right section is fenced in by a dense wall (two slabs
// flanking the faces plus the volume above them) and whose far-left side is
// guarded by a second, sparser wall. The only clear grasps thread the
// narrow gap between the walls at the plate's left end.
Scene make_slot(std::uint64_t seed, bool with_left_wall, bool region_in_wall) {
    Scene scene;
    scene.name = "slot";

    CloudBuilder target(seed);
    target.add_plate(-0.012, 0.050, 0.003, 0.0, 0.10, 0.008, 0.0012);
    scene.target_cloud = target.take();

    CloudBuilder obstacles(seed + 1);
    // Right wall: two slabs hugging the plate faces without touching them.
    obstacles.add_block({0.012, 0.008, 0.02}, {0.050, 0.040, 0.135}, 0.010, 0.0015);
    obstacles.add_block({0.012, -0.040, 0.02}, {0.050, -0.008, 0.135}, 0.010, 0.0015);
    if (with_left_wall) {
        obstacles.add_block({-0.045, -0.040, 0.02}, {-0.015, 0.040, 0.135}, 0.014, 0.0015);
    }
    scene.obstacle_cloud = obstacles.take();

    scene.chain = SerialChain::default_arm(Pose::from_translation(kArmBase));
    scene.intent = "use";
    if (region_in_wall) {
        scene.affordance_regions.push_back(
            region_at({0.035, 0.0, 0.08}, {0.014, 0.010, 0.035}, {"use"}));
    } else {
        scene.affordance_regions.push_back(
            region_at({-0.004, 0.0, 0.08}, {0.012, 0.010, 0.035}, {"use"}));
    }
    return scene;
}

Scene make_open(std::uint64_t seed) {
    Scene scene;
    scene.name = "open";
    CloudBuilder target(seed);
    target.add_sphere({0.0, 0.0, 0.06}, 0.015, 180);
    scene.target_cloud = target.take();
    scene.chain = SerialChain::default_arm(Pose::from_translation(kArmBase));
    scene.intent = "use";
    scene.affordance_regions.push_back(
        region_at({0.0, 0.0, 0.06}, {0.05, 0.05, 0.05}, {"use", "handover"}));
    return scene;
}

Scene make_bowl_rim(std::uint64_t seed) {
    Scene scene;
    scene.name = "bowl-rim";
    CloudBuilder target(seed);
    target.add_stick({0.0, 0.0, 0.0}, 0.008, 0.12, 10, 0.01);
    scene.target_cloud = target.take();
    CloudBuilder obstacles(seed + 1);
    obstacles.add_ring({0.0, 0.0, 0.085}, 0.055, 0.008, 28, 8);
    scene.obstacle_cloud = obstacles.take();
    scene.chain = SerialChain::default_arm(Pose::from_translation(kArmBase));
    scene.intent = "handover";
    scene.affordance_regions.push_back(
        region_at({0.0, 0.0, 0.11}, {0.02, 0.02, 0.02}, {"handover"}));
    return scene;
}

} // namespace

const std::vector<std::string>& synthetic_scene_names() {
    static const std::vector<std::string> names = {"slot", "bowl-rim", "open", "intent-blocked",
                                                   "intent-open"};
    return names;
}

Scene make_synthetic_scene(const std::string& name, std::uint64_t seed) {
    Scene scene;
    if (name == "slot") {
        scene = make_slot(seed, true, false);
    } else if (name == "open") {
        scene = make_open(seed);
    } else if (name == "bowl-rim") {
        scene = make_bowl_rim(seed);
    } else if (name == "intent-blocked") {
        scene = make_slot(seed, false, true);
        scene.name = "intent-blocked";
    } else if (name == "intent-open") {
        scene = make_slot(seed, false, false);
        scene.name = "intent-open";
    } else {
        throw DomainError("unknown synthetic scene \"" + name + "\"");
    }
    scene.validate(EvaluatorRegistry::standard().ids());
    return scene;
}

} // namespace grace
