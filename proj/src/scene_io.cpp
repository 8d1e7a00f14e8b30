#include "grace/scene_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "grace/error.hpp"

namespace grace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Cloud files

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
        out.push_back(tok);
    }
    return out;
}

double parse_double(const std::string& tok, const fs::path& path, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) {
            throw std::invalid_argument(tok);
        }
        return v;
    } catch (const std::exception&) {
        throw IoError(path.string() + ":" + std::to_string(line_no) +
                      ": expected a number, got \"" + tok + "\"");
    }
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

PointCloud load_ply(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    std::size_t line_no = 0;

    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            return true;
        }
        return false;
    };

    if (!next_line() || tokenize(line) != std::vector<std::string>{"ply"}) {
        throw IoError(path.string() + ":1: not a PLY file (missing \"ply\" magic)");
    }

    std::size_t vertex_count = 0;
    bool seen_vertex_element = false;
    std::vector<std::string> properties;
    bool header_done = false;
    while (!header_done) {
        if (!next_line()) {
            throw IoError(path.string() + ": unexpected end of header");
        }
        const auto toks = tokenize(line);
        if (toks.empty() || toks[0] == "comment") {
            continue;
        }
        if (toks[0] == "format") {
            if (toks.size() < 2 || toks[1] != "ascii") {
                throw IoError(path.string() + ":" + std::to_string(line_no) +
                              ": only ascii PLY is supported");
            }
        } else if (toks[0] == "element") {
            if (toks.size() != 3 || toks[1] != "vertex" || seen_vertex_element) {
                throw IoError(path.string() + ":" + std::to_string(line_no) +
                              ": only a single vertex element is supported");
            }
            seen_vertex_element = true;
            vertex_count = static_cast<std::size_t>(parse_double(toks[2], path, line_no));
        } else if (toks[0] == "property") {
            if (!seen_vertex_element || toks.size() != 3) {
                throw IoError(path.string() + ":" + std::to_string(line_no) +
                              ": unsupported property declaration");
            }
            properties.push_back(toks[2]);
        } else if (toks[0] == "end_header") {
            header_done = true;
        } else {
            throw IoError(path.string() + ":" + std::to_string(line_no) +
                          ": unsupported header entry \"" + toks[0] + "\"");
        }
    }
    if (!seen_vertex_element) {
        throw IoError(path.string() + ": header declares no vertex element");
    }

    auto prop_index = [&](const char* name) -> int {
        const auto it = std::find(properties.begin(), properties.end(), name);
        return it == properties.end() ? -1 : static_cast<int>(it - properties.begin());
    };
    const int ix = prop_index("x");
    const int iy = prop_index("y");
    const int iz = prop_index("z");
    if (ix < 0 || iy < 0 || iz < 0) {
        throw IoError(path.string() + ": vertex element lacks x/y/z properties");
    }
    const int inx = prop_index("nx");
    const int iny = prop_index("ny");
    const int inz = prop_index("nz");
    const bool with_normals = inx >= 0 && iny >= 0 && inz >= 0;

    PointCloud cloud;
    cloud.points.reserve(vertex_count);
    for (std::size_t v = 0; v < vertex_count; ++v) {
        if (!next_line()) {
            throw IoError(path.string() + ": expected " + std::to_string(vertex_count) +
                          " vertex rows, found " + std::to_string(v));
        }
        const auto toks = tokenize(line);
        if (toks.size() != properties.size()) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(properties.size()) + " fields, got " +
                          std::to_string(toks.size()));
        }
        cloud.points.emplace_back(parse_double(toks[ix], path, line_no),
                                  parse_double(toks[iy], path, line_no),
                                  parse_double(toks[iz], path, line_no));
        if (with_normals) {
            cloud.normals.emplace_back(parse_double(toks[inx], path, line_no),
                                       parse_double(toks[iny], path, line_no),
                                       parse_double(toks[inz], path, line_no));
        }
    }
    return cloud;
}

void save_ply(const PointCloud& cloud, const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << cloud.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    if (cloud.has_normals()) {
        out << "property double nx\nproperty double ny\nproperty double nz\n";
    }
    out << "end_header\n";
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto& p = cloud.points[i];
        out << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
            << format_double(p.z());
        if (cloud.has_normals()) {
            const auto& n = cloud.normals[i];
            out << ' ' << format_double(n.x()) << ' ' << format_double(n.y()) << ' '
                << format_double(n.z());
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("failed while writing " + path.string());
    }
}

PointCloud load_xyz(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    PointCloud cloud;
    std::string line;
    std::size_t line_no = 0;
    bool saw_normals = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        const auto toks = tokenize(line);
        if (toks.empty()) {
            continue;
        }
        if (toks.size() != 3 && toks.size() != 6) {
            throw IoError(path.string() + ":" + std::to_string(line_no) +
                          ": expected 3 or 6 fields, got " + std::to_string(toks.size()));
        }
        if (cloud.points.empty()) {
            saw_normals = toks.size() == 6;
        } else if ((toks.size() == 6) != saw_normals) {
            throw IoError(path.string() + ":" + std::to_string(line_no) +
                          ": inconsistent column count");
        }
        cloud.points.emplace_back(parse_double(toks[0], path, line_no),
                                  parse_double(toks[1], path, line_no),
                                  parse_double(toks[2], path, line_no));
        if (saw_normals) {
            cloud.normals.emplace_back(parse_double(toks[3], path, line_no),
                                       parse_double(toks[4], path, line_no),
                                       parse_double(toks[5], path, line_no));
        }
    }
    return cloud;
}

PointCloud load_cloud(const fs::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".ply") {
        return load_ply(path);
    }
    if (ext == ".xyz") {
        return load_xyz(path);
    }
    throw IoError("unsupported cloud format \"" + ext + "\" for " + path.string());
}

// ---------------------------------------------------------------------------
// JSON helpers

namespace {

json vec3_to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vec3_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 3) {
        throw ConfigError(field + ": expected an array of 3 numbers");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json quat_to_json(const Eigen::Quaterniond& q) {
    return json::array({q.w(), q.x(), q.y(), q.z()});
}

Eigen::Quaterniond quat_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 4) {
        throw ConfigError(field + ": expected an array of 4 numbers [w,x,y,z]");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json pose_to_json(const Pose& p) {
    return json{{"translation", vec3_to_json(p.translation)},
                {"quaternion", quat_to_json(p.rotation)}};
}

Pose pose_from_json(const json& j, const std::string& field) {
    Eigen::Vector3d t = Eigen::Vector3d::Zero();
    Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
    if (j.contains("translation")) {
        t = vec3_from_json(j["translation"], field + ".translation");
    }
    if (j.contains("quaternion")) {
        q = quat_from_json(j["quaternion"], field + ".quaternion");
    }
    return Pose(t, q);
}

json box_to_json(const Box& b) {
    json j = pose_to_json(b.pose);
    j["half_extent"] = vec3_to_json(b.half_extent);
    return j;
}

Box box_from_json(const json& j, const std::string& field) {
    Box b;
    b.pose = pose_from_json(j, field);
    if (!j.contains("half_extent")) {
        throw ConfigError(field + ".half_extent: missing");
    }
    b.half_extent = vec3_from_json(j["half_extent"], field + ".half_extent");
    return b;
}

json cloud_to_json_ref(const std::string& filename) { return json{{"path", filename}}; }

PointCloud cloud_from_json(const json& j, const fs::path& base_dir, const std::string& field) {
    if (j.contains("path")) {
        const fs::path p = base_dir / j["path"].get<std::string>();
        if (!fs::exists(p)) {
            throw IoError(field + ": cloud file not found: " + p.string());
        }
        return load_cloud(p);
    }
    if (j.contains("points")) {
        PointCloud cloud;
        for (const auto& pv : j["points"]) {
            cloud.points.push_back(vec3_from_json(pv, field + ".points"));
        }
        if (j.contains("normals")) {
            for (const auto& nv : j["normals"]) {
                cloud.normals.push_back(vec3_from_json(nv, field + ".normals"));
            }
        }
        return cloud;
    }
    throw ConfigError(field + ": needs either \"path\" or \"points\"");
}

json params_to_json(const ClassifierParams& p) {
    return json{{"c_manip", p.c_manip},
                {"c_omega", p.c_omega},
                {"c_collision", p.c_collision},
                {"c_stability", p.c_stability},
                {"c_intent", p.c_intent},
                {"omega_threshold", p.omega_threshold},
                {"sdf_threshold", p.sdf_threshold},
                {"stability_threshold", p.stability_threshold},
                {"intent_radius", p.intent_radius},
                {"sigma_region", p.sigma_region},
                {"eps_pose", p.eps_pose},
                {"gate_radius", p.gate_radius},
                {"c_gate", p.c_gate},
                {"rot_weight", p.rot_weight},
                {"literal_collision_sign", p.literal_collision_sign},
                {"collide_with_target", p.collide_with_target}};
}

void params_from_json(const json& j, ClassifierParams& p) {
    auto num = [&](const char* key, double& slot) {
        if (j.contains(key)) slot = j[key].get<double>();
    };
    num("c_manip", p.c_manip);
    num("c_omega", p.c_omega);
    num("c_collision", p.c_collision);
    num("c_stability", p.c_stability);
    num("c_intent", p.c_intent);
    num("omega_threshold", p.omega_threshold);
    num("sdf_threshold", p.sdf_threshold);
    num("stability_threshold", p.stability_threshold);
    num("intent_radius", p.intent_radius);
    num("sigma_region", p.sigma_region);
    num("eps_pose", p.eps_pose);
    num("gate_radius", p.gate_radius);
    num("c_gate", p.c_gate);
    num("rot_weight", p.rot_weight);
    if (j.contains("literal_collision_sign")) {
        p.literal_collision_sign = j["literal_collision_sign"].get<bool>();
    }
    if (j.contains("collide_with_target")) {
        p.collide_with_target = j["collide_with_target"].get<bool>();
    }
    for (const auto& [key, _] : j.items()) {
        static const char* known[] = {
            "c_manip",         "c_omega",        "c_collision",
            "c_stability",     "c_intent",       "omega_threshold",
            "sdf_threshold",   "stability_threshold", "intent_radius",
            "sigma_region",    "eps_pose",       "gate_radius",
            "c_gate",          "rot_weight",     "literal_collision_sign",
            "collide_with_target"};
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* k) { return key == k; }) == std::end(known)) {
            throw ConfigError("scene.params." + key + ": unknown parameter");
        }
    }
}

json gripper_to_json(const GripperModel& g) {
    json boxes = json::array();
    for (const auto& b : g.boxes) {
        boxes.push_back(box_to_json(b));
    }
    return json{{"closing_axis", vec3_to_json(g.closing_axis)},
                {"boxes", boxes},
                {"closing_region", box_to_json(g.closing_region)}};
}

GripperModel gripper_from_json(const json& j) {
    GripperModel g;
    if (j.contains("closing_axis")) {
        g.closing_axis = vec3_from_json(j["closing_axis"], "scene.gripper.closing_axis");
    }
    if (j.contains("boxes")) {
        g.boxes.clear();
        int i = 0;
        for (const auto& bj : j["boxes"]) {
            g.boxes.push_back(
                box_from_json(bj, "scene.gripper.boxes[" + std::to_string(i++) + "]"));
        }
    } else {
        g.boxes = GripperModel::parallel_jaw().boxes;
    }
    if (j.contains("closing_region")) {
        g.closing_region = box_from_json(j["closing_region"], "scene.gripper.closing_region");
    } else {
        g.closing_region = GripperModel::parallel_jaw().closing_region;
    }
    return g;
}

json chain_to_json(const SerialChain& chain) {
    json joints = json::array();
    for (const auto& joint : chain.joints()) {
        json jj = pose_to_json(joint.origin);
        jj["axis"] = vec3_to_json(joint.axis);
        jj["limits"] = json::array({joint.limit_lo, joint.limit_hi});
        joints.push_back(jj);
    }
    return json{{"base", pose_to_json(chain.base())},
                {"tool", pose_to_json(chain.tool())},
                {"joints", joints}};
}

SerialChain chain_from_json(const json& j) {
    Pose base;
    Pose tool;
    if (j.contains("base")) {
        base = pose_from_json(j["base"], "scene.chain.base");
    }
    if (j.contains("tool")) {
        tool = pose_from_json(j["tool"], "scene.chain.tool");
    }
    if (!j.contains("joints") || !j["joints"].is_array()) {
        throw ConfigError("scene.chain.joints: missing or not an array");
    }
    std::vector<RevoluteJoint> joints;
    int i = 0;
    for (const auto& jj : j["joints"]) {
        const std::string field = "scene.chain.joints[" + std::to_string(i++) + "]";
        RevoluteJoint joint;
        joint.origin = pose_from_json(jj, field);
        if (jj.contains("axis")) {
            joint.axis = vec3_from_json(jj["axis"], field + ".axis");
        }
        if (jj.contains("limits")) {
            if (!jj["limits"].is_array() || jj["limits"].size() != 2) {
                throw ConfigError(field + ".limits: expected [lo, hi]");
            }
            joint.limit_lo = jj["limits"][0].get<double>();
            joint.limit_hi = jj["limits"][1].get<double>();
        }
        joints.push_back(joint);
    }
    try {
        return SerialChain(base, std::move(joints), tool);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("scene.chain: ") + e.what());
    }
}

constexpr const char* kSceneSchema = "grace-scene/1";
constexpr const char* kResultSchema = "grace-result/1";

/// World base pose used when a scene omits the chain: behind the workspace,
/// slightly below the table plane.
Pose default_chain_base() { return Pose::from_translation({-0.45, 0.0, -0.10}); }

} // namespace

// ---------------------------------------------------------------------------
// Scene documents

Scene load_scene(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + ": " + e.what());
    }

    if (!doc.contains("schema") || doc["schema"] != kSceneSchema) {
        throw ConfigError("scene.schema: expected \"" + std::string(kSceneSchema) + "\"");
    }

    Scene scene;
    scene.name = doc.value("name", std::string{});
    const fs::path base_dir = path.parent_path();

    if (!doc.contains("target_cloud")) {
        throw ConfigError("scene.target_cloud: missing");
    }
    scene.target_cloud = cloud_from_json(doc["target_cloud"], base_dir, "scene.target_cloud");
    if (doc.contains("obstacle_cloud")) {
        scene.obstacle_cloud =
            cloud_from_json(doc["obstacle_cloud"], base_dir, "scene.obstacle_cloud");
    }

    if (doc.contains("gripper")) {
        scene.gripper = gripper_from_json(doc["gripper"]);
    }
    if (doc.contains("chain")) {
        scene.chain = chain_from_json(doc["chain"]);
    } else {
        scene.chain = SerialChain::default_arm(default_chain_base());
    }
    if (doc.contains("intent")) {
        scene.intent = doc["intent"].get<std::string>();
    }
    if (doc.contains("affordance_regions")) {
        int i = 0;
        for (const auto& rj : doc["affordance_regions"]) {
            const std::string field = "scene.affordance_regions[" + std::to_string(i++) + "]";
            AffordanceRegion region;
            if (!rj.contains("box")) {
                throw ConfigError(field + ".box: missing");
            }
            region.box = box_from_json(rj["box"], field + ".box");
            if (rj.contains("intents")) {
                for (const auto& label : rj["intents"]) {
                    region.intents.push_back(label.get<std::string>());
                }
            }
            scene.affordance_regions.push_back(std::move(region));
        }
    }
    if (doc.contains("params")) {
        params_from_json(doc["params"], scene.params);
    }
    if (doc.contains("hierarchy")) {
        for (const auto& rule : doc["hierarchy"]) {
            std::vector<std::string> ids;
            for (const auto& id : rule) {
                ids.push_back(id.get<std::string>());
            }
            scene.hierarchy_config.push_back(std::move(ids));
        }
    }

    if (!scene.target_cloud.has_normals() && !scene.target_cloud.empty()) {
        const int k = doc.value("normals_k", 12);
        if (static_cast<int>(scene.target_cloud.size()) >= std::max(k, 3)) {
            scene.target_cloud = estimate_normals(scene.target_cloud, std::max(k, 3));
        }
    }

    scene.validate(EvaluatorRegistry::standard().ids());
    return scene;
}

void save_scene(const Scene& scene, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);

    json doc;
    doc["schema"] = kSceneSchema;
    doc["name"] = scene.name;
    save_ply(scene.target_cloud, dir / "target.ply");
    doc["target_cloud"] = cloud_to_json_ref("target.ply");
    if (!scene.obstacle_cloud.empty()) {
        save_ply(scene.obstacle_cloud, dir / "obstacles.ply");
        doc["obstacle_cloud"] = cloud_to_json_ref("obstacles.ply");
    }
    doc["gripper"] = gripper_to_json(scene.gripper);
    if (scene.chain.has_value()) {
        doc["chain"] = chain_to_json(*scene.chain);
    }
    if (scene.intent.has_value()) {
        doc["intent"] = *scene.intent;
    }
    if (!scene.affordance_regions.empty()) {
        json regions = json::array();
        for (const auto& region : scene.affordance_regions) {
            json rj;
            rj["box"] = box_to_json(region.box);
            rj["intents"] = region.intents;
            regions.push_back(rj);
        }
        doc["affordance_regions"] = regions;
    }
    doc["params"] = params_to_json(scene.params);
    if (!scene.hierarchy_config.empty()) {
        doc["hierarchy"] = scene.hierarchy_config;
    }

    std::ofstream out(dir / "scene.json");
    if (!out) {
        throw IoError("cannot write " + (dir / "scene.json").string());
    }
    out << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Results

ResultRecord ResultRecord::from_batch(const Scene& scene, const RuleHierarchy& hierarchy,
                                      const GraspBatch& batch, json config) {
    ResultRecord record;
    record.scene_name = scene.name;
    record.seed = batch.seed;
    record.config = std::move(config);
    for (const auto& rule : hierarchy.rules()) {
        record.hierarchy.push_back(rule.criteria);
    }
    record.grasps = batch.rows;
    return record;
}

namespace {

json grasp_to_json(const GraspRow& row) {
    json j;
    j["translation"] = vec3_to_json(row.pose.translation);
    j["quaternion"] = quat_to_json(row.pose.rotation);
    j["expected_utility"] = row.expected_utility;
    j["log_bound"] = row.log_bound;
    j["rule_probs"] = row.rule_probs;
    j["criterion_probs"] = row.criterion_probs;
    j["rank_pmf"] = rank_pmf(row.rule_probs);
    j["iteration"] = row.iteration;
    j["origin"] = to_string(row.origin);
    return j;
}

GraspRow grasp_from_json(const json& j) {
    GraspRow row;
    row.pose = Pose(vec3_from_json(j["translation"], "grasp.translation"),
                    quat_from_json(j["quaternion"], "grasp.quaternion"));
    row.expected_utility = j["expected_utility"].get<double>();
    row.log_bound = j["log_bound"].get<double>();
    row.rule_probs = j["rule_probs"].get<std::vector<double>>();
    row.criterion_probs = j["criterion_probs"].get<std::vector<std::vector<double>>>();
    row.iteration = j["iteration"].get<int>();
    row.origin = grasp_origin_from_string(j["origin"].get<std::string>());
    return row;
}

} // namespace

void save_results(const ResultRecord& record, const fs::path& path) {
    json doc;
    doc["schema"] = kResultSchema;
    doc["scene"] = record.scene_name;
    doc["seed"] = record.seed;
    doc["config"] = record.config;
    doc["hierarchy"] = record.hierarchy;
    json grasps = json::array();
    for (const auto& row : record.grasps) {
        grasps.push_back(grasp_to_json(row));
    }
    doc["grasps"] = grasps;
    if (record.wall_seconds.has_value()) {
        doc["timings"] = json{{"wall_s", *record.wall_seconds}};
    }

    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << doc.dump(2) << "\n";
    if (!out) {
        throw IoError("failed while writing " + path.string());
    }

    // Flat CSV twin.
    fs::path csv_path = path;
    csv_path.replace_extension(".csv");
    std::ofstream csv(csv_path);
    if (!csv) {
        throw IoError("cannot write " + csv_path.string());
    }
    csv << "index,tx,ty,tz,qw,qx,qy,qz,expected_utility,log_bound";
    const std::size_t n_rules = record.hierarchy.size();
    for (std::size_t i = 1; i <= n_rules; ++i) {
        csv << ",q_" << i;
    }
    for (std::size_t i = 0; i < n_rules; ++i) {
        for (const auto& id : record.hierarchy[i]) {
            csv << ",p_" << (i + 1) << "_" << id;
        }
    }
    csv << ",iteration,origin\n";
    for (std::size_t r = 0; r < record.grasps.size(); ++r) {
        const auto& row = record.grasps[r];
        const auto& t = row.pose.translation;
        const auto& q = row.pose.rotation;
        csv << r << ',' << format_double(t.x()) << ',' << format_double(t.y()) << ','
            << format_double(t.z()) << ',' << format_double(q.w()) << ','
            << format_double(q.x()) << ',' << format_double(q.y()) << ','
            << format_double(q.z()) << ',' << format_double(row.expected_utility) << ','
            << format_double(row.log_bound);
        for (double qp : row.rule_probs) {
            csv << ',' << format_double(qp);
        }
        for (const auto& rule : row.criterion_probs) {
            for (double p : rule) {
                csv << ',' << format_double(p);
            }
        }
        csv << ',' << row.iteration << ',' << to_string(row.origin) << '\n';
    }
}

ResultRecord load_results(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    if (!doc.contains("schema") || doc["schema"] != kResultSchema) {
        throw ConfigError("result.schema: expected \"" + std::string(kResultSchema) + "\"");
    }
    ResultRecord record;
    record.scene_name = doc.value("scene", std::string{});
    record.seed = doc.value("seed", std::uint64_t{0});
    record.config = doc.value("config", json::object());
    record.hierarchy = doc.value("hierarchy", std::vector<std::vector<std::string>>{});
    for (const auto& gj : doc["grasps"]) {
        record.grasps.push_back(grasp_from_json(gj));
    }
    if (doc.contains("timings")) {
        record.wall_seconds = doc["timings"]["wall_s"].get<double>();
    }
    return record;
}

void save_iteration_stats(const std::vector<IterationStats>& stats, const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    std::size_t n_rules = 0;
    for (const auto& st : stats) {
        n_rules = std::max(n_rules, st.best_rule_probs.size());
    }
    out << "iteration,best_utility,mean_utility";
    for (std::size_t i = 1; i <= n_rules; ++i) {
        out << ",best_q_" << i;
    }
    out << "\n";
    for (const auto& st : stats) {
        out << st.iteration << ',' << format_double(st.best_utility) << ','
            << format_double(st.mean_utility);
        for (double q : st.best_rule_probs) {
            out << ',' << format_double(q);
        }
        out << '\n';
    }
}

std::vector<double> rank_pmf(const std::vector<double>& rule_probs) {
    const int n = static_cast<int>(rule_probs.size());
    if (n < 1 || n > 16) {
        throw DomainError("rank_pmf: rule count must be in [1, 16]");
    }
    const std::size_t total = std::size_t{1} << n;
    std::vector<double> pmf(total, 0.0);
    SatisfactionPattern pattern;
    pattern.bits.resize(n);
    for (std::size_t mask = 0; mask < total; ++mask) {
        double prob = 1.0;
        for (int i = 0; i < n; ++i) {
            const bool bit = (mask >> i) & 1u;
            pattern.bits[i] = bit;
            prob *= bit ? rule_probs[i] : 1.0 - rule_probs[i];
        }
        pmf[static_cast<std::size_t>(rank(pattern) - 1)] += prob;
    }
    return pmf;
}

} // namespace grace
