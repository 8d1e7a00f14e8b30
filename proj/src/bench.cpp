#include "grace/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "grace/error.hpp"

namespace grace {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

double top10_mean(const GraspBatch& batch) {
    const std::size_t n = std::min<std::size_t>(10, batch.size());
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += batch.rows[i].expected_utility;
    }
    return n == 0 ? 0.0 : s / static_cast<double>(n);
}

double collision_free_frac(const GraspBatch& batch, const Scene& scene,
                           const EvaluatorRegistry& registry) {
    const std::size_t n = std::min<std::size_t>(10, batch.size());
    if (n == 0) return 0.0;
    const auto& collision = registry.get("collision");
    std::size_t good = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (collision.evaluate(batch.rows[i].pose, scene) > 0.5) {
            ++good;
        }
    }
    return static_cast<double>(good) / static_cast<double>(n);
}

} // namespace

RuleHierarchy ablation_hierarchy(const std::string& code) {
    // E and C share one rule when both appear, matching the standard ranking.
    std::vector<std::vector<std::string>> rules;
    bool pending_c = code.find('C') != std::string::npos;
    for (char letter : code) {
        switch (letter) {
            case 'S': rules.push_back({"stability"}); break;
            case 'E':
                if (pending_c) {
                    rules.push_back({"execution", "collision"});
                    pending_c = false;
                } else {
                    rules.push_back({"execution"});
                }
                break;
            case 'C':
                if (pending_c) {
                    rules.push_back({"collision"});
                    pending_c = false;
                }
                break;
            case 'N': rules.push_back({"intention"}); break;
            default:
                throw DomainError(std::string("ablation code: unknown letter '") + letter +
                                  "'");
        }
    }
    return RuleHierarchy(std::move(rules));
}

BenchmarkEntry run_method(const std::string& method, const Scene& scene, std::uint64_t seed,
                          const BenchOptions& options) {
    const EvaluatorRegistry registry = EvaluatorRegistry::standard();
    SamplerSpec sampler;

    const auto start = std::chrono::steady_clock::now();
    GraspBatch batch;
    if (method == "grace" || method.rfind("ablation-", 0) == 0) {
        const RuleHierarchy hierarchy = method == "grace"
                                            ? scene.hierarchy()
                                            : ablation_hierarchy(method.substr(9));
        OptimizerConfig config = options.grace_config;
        config.seed = seed;
        config.batch = options.grace_samples;
        config.selection_size = options.grace_samples;
        batch = grace_opt(scene, hierarchy, config, sampler, registry);
    } else if (method.rfind("filter-", 0) == 0) {
        const int n = std::stoi(method.substr(7));
        batch = filter_baseline(scene, scene.hierarchy(), sampler, n,
                                std::min(n, options.grace_samples), seed, registry);
    } else {
        throw DomainError("unknown benchmark method \"" + method + "\"");
    }
    const auto stop = std::chrono::steady_clock::now();

    BenchmarkEntry entry;
    entry.method = method;
    entry.seed = seed;
    entry.top10_mean_utility = top10_mean(batch);
    entry.top1_utility = batch.rows.empty() ? 0.0 : batch.best().expected_utility;
    entry.top1_rule_probs = batch.rows.empty() ? std::vector<double>{} : batch.best().rule_probs;
    entry.top10_collision_free_frac = collision_free_frac(batch, scene, registry);
    entry.evaluations = batch.evaluations;
    if (options.measure_time) {
        entry.wall_seconds =
            std::chrono::duration_cast<std::chrono::duration<double>>(stop - start).count();
    }
    return entry;
}

BenchmarkReport run_benchmark(const Scene& scene, const BenchOptions& options) {
    if (options.seeds < 1) {
        throw DomainError("benchmark: seeds must be >= 1");
    }
    std::vector<std::string> methods = {"grace"};
    for (int n : options.filter_sizes) {
        methods.push_back("filter-" + std::to_string(n));
    }
    if (options.with_ablations) {
        for (const char* code : {"S", "SE", "SC", "SEC", "SECN"}) {
            methods.push_back(std::string("ablation-") + code);
        }
    }

    BenchmarkReport report;
    report.scene_name = scene.name;
    for (const auto& method : methods) {
        for (int s = 1; s <= options.seeds; ++s) {
            report.entries.push_back(
                run_method(method, scene, static_cast<std::uint64_t>(s), options));
        }
    }
    return report;
}

std::vector<const BenchmarkEntry*> BenchmarkReport::method_entries(
    const std::string& method) const {
    std::vector<const BenchmarkEntry*> out;
    for (const auto& entry : entries) {
        if (entry.method == method) {
            out.push_back(&entry);
        }
    }
    return out;
}

std::vector<MethodSummary> BenchmarkReport::summaries() const {
    std::vector<std::string> order;
    std::map<std::string, std::vector<const BenchmarkEntry*>> by_method;
    for (const auto& entry : entries) {
        if (!by_method.count(entry.method)) {
            order.push_back(entry.method);
        }
        by_method[entry.method].push_back(&entry);
    }
    std::vector<MethodSummary> out;
    for (const auto& method : order) {
        std::vector<double> top10;
        std::vector<double> frac;
        for (const auto* e : by_method[method]) {
            top10.push_back(e->top10_mean_utility);
            frac.push_back(e->top10_collision_free_frac);
        }
        MethodSummary s;
        s.method = method;
        s.mean_top10_utility = mean_of(top10);
        s.std_top10_utility = std_of(top10);
        s.mean_collision_free_frac = mean_of(frac);
        out.push_back(s);
    }
    return out;
}

namespace {

std::string join_probs(const std::vector<double>& probs) {
    std::string out;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (i > 0) out += ';';
        out += format_double(probs[i]);
    }
    return out;
}

std::vector<double> split_probs(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
        if (!tok.empty()) {
            out.push_back(std::stod(tok));
        }
    }
    return out;
}

} // namespace

void save_benchmark_report(const BenchmarkReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    bool with_time = false;
    for (const auto& e : report.entries) {
        with_time = with_time || e.wall_seconds.has_value();
    }
    out << "scene,method,seed,top10_mean_utility,top1_utility,top10_collision_free_frac,"
           "evaluations,top1_rule_probs";
    if (with_time) {
        out << ",wall_s";
    }
    out << "\n";
    for (const auto& e : report.entries) {
        out << report.scene_name << ',' << e.method << ',' << e.seed << ','
            << format_double(e.top10_mean_utility) << ',' << format_double(e.top1_utility)
            << ',' << format_double(e.top10_collision_free_frac) << ',' << e.evaluations << ','
            << join_probs(e.top1_rule_probs);
        if (with_time) {
            out << ',' << (e.wall_seconds ? format_double(*e.wall_seconds) : std::string{});
        }
        out << '\n';
    }
}

BenchmarkReport load_benchmark_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError(path.string() + ":1: empty report");
    }
    const bool with_time = line.find(",wall_s") != std::string::npos;
    BenchmarkReport report;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            cols.push_back(tok);
        }
        const std::size_t expected = with_time ? 9 : 8;
        if (cols.size() != expected && cols.size() != expected - 1) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(expected) + " columns, got " +
                          std::to_string(cols.size()));
        }
        report.scene_name = cols[0];
        BenchmarkEntry e;
        e.method = cols[1];
        e.seed = std::stoull(cols[2]);
        e.top10_mean_utility = std::stod(cols[3]);
        e.top1_utility = std::stod(cols[4]);
        e.top10_collision_free_frac = std::stod(cols[5]);
        e.evaluations = std::stoll(cols[6]);
        if (cols.size() >= 8) {
            e.top1_rule_probs = split_probs(cols[7]);
        }
        if (with_time && cols.size() == 9 && !cols[8].empty()) {
            e.wall_seconds = std::stod(cols[8]);
        }
        report.entries.push_back(std::move(e));
    }
    return report;
}

void save_benchmark_long(const BenchmarkReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << "scene,method,seed,metric,value\n";
    auto row = [&](const std::string& method, const std::string& seed,
                   const std::string& metric, double value) {
        out << report.scene_name << ',' << method << ',' << seed << ',' << metric << ','
            << format_double(value) << '\n';
    };
    for (const auto& e : report.entries) {
        const std::string seed = std::to_string(e.seed);
        row(e.method, seed, "top10_mean_utility", e.top10_mean_utility);
        row(e.method, seed, "top1_utility", e.top1_utility);
        row(e.method, seed, "top10_collision_free_frac", e.top10_collision_free_frac);
        row(e.method, seed, "evaluations", static_cast<double>(e.evaluations));
        for (std::size_t i = 0; i < e.top1_rule_probs.size(); ++i) {
            row(e.method, seed, "top1_q" + std::to_string(i + 1), e.top1_rule_probs[i]);
        }
        if (e.wall_seconds.has_value()) {
            row(e.method, seed, "wall_s", *e.wall_seconds);
        }
    }
    for (const auto& s : report.summaries()) {
        row(s.method, "mean", "top10_mean_utility", s.mean_top10_utility);
        row(s.method, "std", "top10_mean_utility", s.std_top10_utility);
        row(s.method, "mean", "top10_collision_free_frac", s.mean_collision_free_frac);
    }
}

} // namespace grace
