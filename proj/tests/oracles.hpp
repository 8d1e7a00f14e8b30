// Independent test oracles: brute-force enumeration and finite differences.
// These deliberately avoid the code paths they are used to check.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "grace/hierarchy.hpp"
#include "grace/pose.hpp"
#include "grace/rng.hpp"

namespace grace::testing {

/// E[-rank] by full enumeration of all 2^N satisfaction patterns,
/// accumulated in extended precision.
inline double brute_force_expected_utility(const RuleProbabilities& probs) {
    const int n = probs.size();
    const std::vector<double> q = probs.rule_products();
    long double total = 0.0L;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        long double prob = 1.0L;
        long double r = static_cast<long double>(std::int64_t{1} << n);
        for (int i = 0; i < n; ++i) {
            if ((mask >> i) & 1u) {
                prob *= static_cast<long double>(q[i]);
                r -= static_cast<long double>(std::int64_t{1} << (n - 1 - i));
            } else {
                prob *= 1.0L - static_cast<long double>(q[i]);
            }
        }
        total += prob * (-r);
    }
    return static_cast<double>(total);
}

/// Central finite differences of a scalar pose function through retract.
inline TangentVector finite_difference_gradient(const std::function<double(const Pose&)>& f,
                                                const Pose& g, double h = 1e-5) {
    TangentVector grad;
    for (int c = 0; c < 6; ++c) {
        TangentVector step = TangentVector::Zero();
        step[c] = h;
        const double plus = f(retract(g, step));
        step[c] = -h;
        const double minus = f(retract(g, step));
        grad[c] = (plus - minus) / (2.0 * h);
    }
    return grad;
}

/// Relative error between an analytic gradient and its finite-difference
/// estimate, with an absolute floor for near-zero gradients.
inline double gradient_relative_error(const TangentVector& analytic, const TangentVector& fd,
                                      double floor = 1e-8) {
    return (analytic - fd).norm() / std::max(fd.norm(), floor);
}

/// Random per-criterion probabilities for a hierarchy with n rules.
inline RuleProbabilities random_probabilities(Prng& rng, int n, int max_criteria = 3,
                                              double lo = 0.0, double hi = 1.0) {
    std::vector<std::vector<double>> per;
    for (int i = 0; i < n; ++i) {
        const int m = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(max_criteria)));
        std::vector<double> ps;
        for (int j = 0; j < m; ++j) {
            ps.push_back(rng.uniform(lo, hi));
        }
        per.push_back(std::move(ps));
    }
    return RuleProbabilities(std::move(per));
}

} // namespace grace::testing
