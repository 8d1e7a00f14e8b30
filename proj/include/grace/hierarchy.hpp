#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace grace {

/// Probabilities below this are clamped before taking logarithms. The builtin
/// classifiers are sigmoids and never return exact zero, but user-supplied
/// evaluators might.
inline constexpr double kProbFloor = 1e-12;

/// Largest supported number of rules: ranks must fit a signed 64-bit integer.
inline constexpr int kMaxRules = 62;

/// One rule: the conjunction of all criteria sharing a priority level.
struct Rule {
    int priority = 0;                   ///< 1-based, 1 = most important
    std::vector<std::string> criteria;  ///< evaluator identifiers, non-empty
};

/// An ordered list of rules with priorities 1..N (descending importance).
/// Induces a total order on grasps via rank().
class RuleHierarchy {
public:
    /// Builds a hierarchy from per-rule criterion id lists; priorities are
    /// assigned in order. Throws DomainError on an empty hierarchy or an
    /// empty rule.
    explicit RuleHierarchy(std::vector<std::vector<std::string>> rule_criteria);

    /// The ranking used by the builtin classifiers: stability first,
    /// execution and collision together at priority 2, intention last.
    static RuleHierarchy standard();

    int size() const { return static_cast<int>(rules_.size()); }
    const std::vector<Rule>& rules() const { return rules_; }
    const Rule& rule(int priority) const { return rules_.at(priority - 1); }

    /// All criterion identifiers in rule order (duplicates preserved).
    std::vector<std::string> criterion_ids() const;

private:
    std::vector<Rule> rules_;
};

/// Boolean satisfaction of each rule for a concrete grasp; bit i corresponds
/// to priority i+1.
struct SatisfactionPattern {
    std::vector<bool> bits;
};

/// Per-criterion satisfaction probabilities, grouped by rule. The probability
/// that rule i is satisfied is the product over its criteria (criteria are
/// conditionally independent given grasp and context).
class RuleProbabilities {
public:
    RuleProbabilities() = default;
    explicit RuleProbabilities(std::vector<std::vector<double>> per_criterion);

    /// Treats each rule probability as a single-criterion rule.
    static RuleProbabilities from_rule_products(const std::vector<double>& products);

    int size() const { return static_cast<int>(per_criterion_.size()); }
    const std::vector<std::vector<double>>& per_criterion() const { return per_criterion_; }

    /// q_i: product of the rule's criterion probabilities.
    double rule_product(int priority) const;
    std::vector<double> rule_products() const;

private:
    std::vector<std::vector<double>> per_criterion_;
};

/// Rank of a satisfaction pattern: 1 when every rule holds, 2^N when none
/// does. Lower rank is better. Exact integer arithmetic; N <= 62.
std::int64_t rank(const SatisfactionPattern& pattern);

/// Rank-preserving integer utility u = 2^N - rank + 1 (range [1, 2^N]).
std::int64_t utility(const SatisfactionPattern& pattern);

/// Expected utility U = sum_i 2^(N-i) q_i - 2^N, the negative expected rank.
/// Range [-2^N, -1]. Note the integer utility above is shifted by the
/// constant 2^N + 1 relative to this form; both induce the same ordering.
double expected_utility(const RuleProbabilities& probs);

/// Log lower bound L = sum over all criteria of log p, with each p clamped
/// to [kProbFloor, 1] first. Always exp(L) <= U + 2^N when nothing was
/// clamped; equality holds for a single rule with a single criterion.
double log_lower_bound(const RuleProbabilities& probs);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_err = 0.0;
};

/// Estimates E[-rank] by sampling each rule as an independent Bernoulli.
/// Deterministic for a fixed seed; draws must be >= 1.
MonteCarloEstimate monte_carlo_utility(const RuleProbabilities& probs, std::int64_t draws,
                                       std::uint64_t seed);

} // namespace grace
