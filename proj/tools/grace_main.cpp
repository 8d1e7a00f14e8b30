// Command-line front end: optimize / filter / bench / rank-table / scene.
// Exit codes: 0 ok, 1 domain or validation error, 2 I/O error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "grace/bench.hpp"
#include "grace/error.hpp"
#include "grace/scene_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string scene_path;
    std::string out_path = "results.json";
    std::uint64_t seed = 0;
    int samples = 50;
    int top = 50;
    bool literal_collision_sign = false;
    bool timings = false;
};

grace::Scene load_scene_arg(const CommonArgs& args) {
    if (!fs::exists(args.scene_path)) {
        throw grace::IoError("scene file not found: " + args.scene_path);
    }
    grace::Scene scene = grace::load_scene(args.scene_path);
    if (args.literal_collision_sign) {
        scene.params.literal_collision_sign = true;
    }
    return scene;
}

void write_results(const grace::Scene& scene, const grace::RuleHierarchy& hierarchy,
                   const grace::GraspBatch& batch, const json& config, const CommonArgs& args,
                   double wall_seconds) {
    grace::ResultRecord record =
        grace::ResultRecord::from_batch(scene, hierarchy, batch, config);
    if (args.timings) {
        record.wall_seconds = wall_seconds;
    }
    grace::save_results(record, args.out_path);
    fs::path stats_path = fs::path(args.out_path);
    stats_path.replace_extension(".iters.csv");
    grace::save_iteration_stats(batch.stats, stats_path);
    std::fprintf(stderr, "wrote %s (%zu grasps, best U %.4f, %.2fs)\n", args.out_path.c_str(),
                 batch.size(), batch.rows.empty() ? 0.0 : batch.best().expected_utility,
                 wall_seconds);
}

int run_optimize(const CommonArgs& args, const grace::OptimizerConfig& cfg_in) {
    grace::OptimizerConfig config = cfg_in;
    config.seed = args.seed;
    config.batch = args.samples;
    config.selection_size = args.top;
    config.validate();

    const grace::Scene scene = load_scene_arg(args);
    const grace::RuleHierarchy hierarchy = scene.hierarchy();
    const grace::SamplerSpec sampler;

    const auto start = std::chrono::steady_clock::now();
    const grace::GraspBatch batch =
        grace::grace_opt(scene, hierarchy, config, sampler);
    const auto stop = std::chrono::steady_clock::now();

    json config_echo = {{"command", "optimize"},
                        {"scene", args.scene_path},
                        {"seed", args.seed},
                        {"samples", args.samples},
                        {"outer", config.outer_iterations},
                        {"inner", config.inner_steps},
                        {"eta", config.step_size},
                        {"top", args.top},
                        {"paper_literal_collision_sign", args.literal_collision_sign}};
    write_results(scene, hierarchy, batch, config_echo, args,
                  std::chrono::duration<double>(stop - start).count());
    return 0;
}

int run_filter(const CommonArgs& args) {
    if (args.samples < 1) {
        throw grace::DomainError("--samples must be >= 1");
    }
    if (args.samples < args.top) {
        throw grace::DomainError("--samples must be >= --top");
    }
    const grace::Scene scene = load_scene_arg(args);
    const grace::RuleHierarchy hierarchy = scene.hierarchy();
    const grace::SamplerSpec sampler;

    const auto start = std::chrono::steady_clock::now();
    const grace::GraspBatch batch = grace::filter_baseline(scene, hierarchy, sampler,
                                                           args.samples, args.top, args.seed);
    const auto stop = std::chrono::steady_clock::now();

    json config_echo = {{"command", "filter"},
                        {"scene", args.scene_path},
                        {"seed", args.seed},
                        {"samples", args.samples},
                        {"top", args.top},
                        {"paper_literal_collision_sign", args.literal_collision_sign}};
    write_results(scene, hierarchy, batch, config_echo, args,
                  std::chrono::duration<double>(stop - start).count());
    return 0;
}

int run_bench(const CommonArgs& args, int seeds, const std::string& prefix) {
    grace::BenchOptions options;
    options.seeds = seeds;
    options.measure_time = args.timings;
    const grace::Scene scene = load_scene_arg(args);

    const grace::BenchmarkReport report = grace::run_benchmark(scene, options);
    grace::save_benchmark_report(report, prefix + "_report.csv");
    grace::save_benchmark_long(report, prefix + "_long.csv");
    for (const auto& s : report.summaries()) {
        std::fprintf(stderr, "%-16s top10 U %.4f +- %.4f  collision-free %.2f\n",
                     s.method.c_str(), s.mean_top10_utility, s.std_top10_utility,
                     s.mean_collision_free_frac);
    }
    return 0;
}

int run_rank_table(const std::string& scene_path, int n_rules) {
    std::vector<std::vector<std::string>> rules;
    if (!scene_path.empty()) {
        if (!fs::exists(scene_path)) {
            throw grace::IoError("scene file not found: " + scene_path);
        }
        const grace::Scene scene = grace::load_scene(scene_path);
        for (const auto& rule : scene.hierarchy().rules()) {
            rules.push_back(rule.criteria);
        }
    } else {
        if (n_rules < 1 || n_rules > 16) {
            throw grace::DomainError("rank-table: rule count must be in [1, 16]");
        }
        if (n_rules == 3) {
            rules = {{"stability"}, {"execution", "collision"}, {"intention"}};
        } else {
            for (int i = 1; i <= n_rules; ++i) {
                rules.push_back({"c" + std::to_string(i)});
            }
        }
    }
    const grace::RuleHierarchy hierarchy(rules);
    const int n = hierarchy.size();
    if (n > 16) {
        throw grace::DomainError("rank-table: hierarchy too large (N > 16)");
    }

    std::printf("pattern  rank  utility  probability\n");
    const std::int64_t total = std::int64_t{1} << n;
    grace::SatisfactionPattern pattern;
    pattern.bits.resize(n);
    for (std::int64_t r = 1; r <= total; ++r) {
        // Recover the unique pattern with this rank.
        std::int64_t deficit = (std::int64_t{1} << n) - r;
        std::string bits;
        for (int i = 0; i < n; ++i) {
            const std::int64_t weight = std::int64_t{1} << (n - 1 - i);
            pattern.bits[i] = deficit >= weight;
            if (pattern.bits[i]) {
                deficit -= weight;
            }
            bits += pattern.bits[i] ? '1' : '0';
        }
        std::string prob;
        for (int i = 0; i < n; ++i) {
            std::string q;
            for (std::size_t j = 0; j < hierarchy.rules()[i].criteria.size(); ++j) {
                if (j > 0) q += "*";
                q += "p(" + hierarchy.rules()[i].criteria[j] + ")";
            }
            if (!prob.empty()) prob += " * ";
            prob += pattern.bits[i] ? q : "(1-" + q + ")";
        }
        std::printf("%-8s %-5lld %-8lld %s\n", bits.c_str(),
                    static_cast<long long>(grace::rank(pattern)),
                    static_cast<long long>(grace::utility(pattern)), prob.c_str());
    }
    return 0;
}

int run_scene_gen(const std::string& name, std::uint64_t seed, const std::string& out_dir) {
    const grace::Scene scene = grace::make_synthetic_scene(name, seed);
    grace::save_scene(scene, out_dir);
    std::fprintf(stderr, "wrote %s/scene.json (%zu target points, %zu obstacle points)\n",
                 out_dir.c_str(), scene.target_cloud.size(), scene.obstacle_cloud.size());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prioritized multi-criteria grasp ranking and optimization"};
    app.require_subcommand(1);

    CommonArgs args;
    grace::OptimizerConfig opt_config;
    int bench_seeds = 20;
    std::string bench_prefix = "bench";
    std::string table_scene;
    int table_rules = 3;
    std::string gen_name = "slot";
    std::uint64_t gen_seed = 0;
    std::string gen_out = "scene_out";

    auto add_common = [&](CLI::App* cmd, bool with_samples) {
        cmd->add_option("--scene", args.scene_path, "scene document path")->required();
        cmd->add_option("--seed", args.seed, "RNG seed");
        if (with_samples) {
            cmd->add_option("--samples", args.samples, "initial sample count");
            cmd->add_option("--top", args.top, "selection size Q");
            cmd->add_option("--out", args.out_path, "result JSON path");
        }
        cmd->add_flag("--paper-literal-collision-sign", args.literal_collision_sign,
                      "use the literal collision sigmoid sign");
        cmd->add_flag("--timings", args.timings, "include wall time in output files");
    };

    CLI::App* optimize = app.add_subcommand("optimize", "run the hybrid optimizer");
    add_common(optimize, true);
    optimize->add_option("--outer", opt_config.outer_iterations, "outer iterations T");
    optimize->add_option("--inner", opt_config.inner_steps, "inner gradient steps K");
    optimize->add_option("--eta", opt_config.step_size, "inner step size");
    optimize->add_option("--clip", opt_config.max_step_norm, "tangent step clip");

    CLI::App* filter = app.add_subcommand("filter", "sample-and-filter baseline");
    add_common(filter, true);

    CLI::App* bench = app.add_subcommand("bench", "filter-vs-optimizer comparison");
    add_common(bench, false);
    bench->add_option("--seeds", bench_seeds, "number of seeds");
    bench->add_option("--out", bench_prefix, "output file prefix");

    CLI::App* table = app.add_subcommand("rank-table", "print the rank/utility table");
    table->add_option("--scene", table_scene, "take the hierarchy from a scene document");
    table->add_option("--rules", table_rules, "rule count for a generic hierarchy");

    CLI::App* gen = app.add_subcommand("scene", "generate a synthetic benchmark scene");
    gen->add_option("--name", gen_name, "one of: slot, bowl-rim, open, intent-blocked, intent-open");
    gen->add_option("--gen-seed,--seed", gen_seed, "scene generation seed");
    gen->add_option("--out", gen_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(optimize)) {
            if (args.samples < 1) {
                throw grace::DomainError("--samples must be >= 1");
            }
            return run_optimize(args, opt_config);
        }
        if (app.got_subcommand(filter)) {
            return run_filter(args);
        }
        if (app.got_subcommand(bench)) {
            return run_bench(args, bench_seeds, bench_prefix);
        }
        if (app.got_subcommand(table)) {
            return run_rank_table(table_scene, table_rules);
        }
        if (app.got_subcommand(gen)) {
            return run_scene_gen(gen_name, gen_seed, gen_out);
        }
    } catch (const grace::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 2;
    } catch (const grace::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
