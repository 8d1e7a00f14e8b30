#include "grace/hierarchy.hpp"

#include <algorithm>
#include <cmath>

#include "grace/error.hpp"
#include "grace/rng.hpp"

namespace grace {

RuleHierarchy::RuleHierarchy(std::vector<std::vector<std::string>> rule_criteria) {
    if (rule_criteria.empty()) {
        throw DomainError("hierarchy: needs at least one rule");
    }
    rules_.reserve(rule_criteria.size());
    int priority = 1;
    for (auto& criteria : rule_criteria) {
        if (criteria.empty()) {
            throw DomainError("hierarchy: rule " + std::to_string(priority) +
                              " has no criteria");
        }
        rules_.push_back(Rule{priority, std::move(criteria)});
        ++priority;
    }
}

RuleHierarchy RuleHierarchy::standard() {
    return RuleHierarchy({{"stability"}, {"execution", "collision"}, {"intention"}});
}

std::vector<std::string> RuleHierarchy::criterion_ids() const {
    std::vector<std::string> ids;
    for (const auto& rule : rules_) {
        ids.insert(ids.end(), rule.criteria.begin(), rule.criteria.end());
    }
    return ids;
}

RuleProbabilities::RuleProbabilities(std::vector<std::vector<double>> per_criterion)
    : per_criterion_(std::move(per_criterion)) {
    for (const auto& rule : per_criterion_) {
        if (rule.empty()) {
            throw DomainError("rule probabilities: empty rule");
        }
    }
}

RuleProbabilities RuleProbabilities::from_rule_products(const std::vector<double>& products) {
    std::vector<std::vector<double>> per;
    per.reserve(products.size());
    for (double q : products) {
        per.push_back({q});
    }
    return RuleProbabilities(std::move(per));
}

double RuleProbabilities::rule_product(int priority) const {
    const auto& ps = per_criterion_.at(priority - 1);
    double q = 1.0;
    for (double p : ps) {
        q *= p;
    }
    return q;
}

std::vector<double> RuleProbabilities::rule_products() const {
    std::vector<double> q(per_criterion_.size());
    for (int i = 1; i <= size(); ++i) {
        q[i - 1] = rule_product(i);
    }
    return q;
}

namespace {

void check_rule_count(int n) {
    if (n < 1 || n > kMaxRules) {
        throw DomainError("rank: hierarchy size " + std::to_string(n) +
                          " outside supported range [1, " + std::to_string(kMaxRules) + "]");
    }
}

} // namespace

std::int64_t rank(const SatisfactionPattern& pattern) {
    const int n = static_cast<int>(pattern.bits.size());
    check_rule_count(n);
    std::int64_t r = std::int64_t{1} << n;
    for (int i = 0; i < n; ++i) {
        if (pattern.bits[i]) {
            r -= std::int64_t{1} << (n - 1 - i);
        }
    }
    return r;
}

std::int64_t utility(const SatisfactionPattern& pattern) {
    const int n = static_cast<int>(pattern.bits.size());
    check_rule_count(n);
    return (std::int64_t{1} << n) - rank(pattern) + 1;
}

double expected_utility(const RuleProbabilities& probs) {
    const int n = probs.size();
    check_rule_count(n);
    double sum = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double q = probs.rule_product(i);
        if (!(q >= 0.0 && q <= 1.0) || !std::isfinite(q)) {
            throw DomainError("expected_utility: rule " + std::to_string(i) +
                              " probability " + std::to_string(q) + " outside [0,1]");
        }
        sum += std::ldexp(q, n - i); // 2^(N-i) * q_i
    }
    return sum - std::ldexp(1.0, n);
}

double log_lower_bound(const RuleProbabilities& probs) {
    check_rule_count(probs.size());
    double sum = 0.0;
    for (const auto& rule : probs.per_criterion()) {
        for (double p : rule) {
            sum += std::log(std::clamp(p, kProbFloor, 1.0));
        }
    }
    return sum;
}

MonteCarloEstimate monte_carlo_utility(const RuleProbabilities& probs, std::int64_t draws,
                                       std::uint64_t seed) {
    const int n = probs.size();
    check_rule_count(n);
    if (draws < 1) {
        throw DomainError("monte_carlo_utility: draws must be >= 1");
    }
    const std::vector<double> q = probs.rule_products();
    Prng rng(seed);
    double sum = 0.0;
    double sum_sq = 0.0;
    SatisfactionPattern pattern;
    pattern.bits.resize(n);
    for (std::int64_t d = 0; d < draws; ++d) {
        for (int i = 0; i < n; ++i) {
            pattern.bits[i] = rng.uniform01() < q[i];
        }
        const double value = -static_cast<double>(rank(pattern));
        sum += value;
        sum_sq += value * value;
    }
    const double mean = sum / static_cast<double>(draws);
    MonteCarloEstimate est;
    est.mean = mean;
    if (draws > 1) {
        const double var =
            std::max(0.0, (sum_sq - sum * mean) / static_cast<double>(draws - 1));
        est.std_err = std::sqrt(var / static_cast<double>(draws));
    }
    return est;
}

} // namespace grace
