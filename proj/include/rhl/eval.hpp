#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rhl/instances.hpp"
#include "rhl/learner.hpp"

namespace rhl {

// Exact optimum of the reliable benchmark: the smallest achievable negative
// risk among predictors with zero false positives (thresholds on the hidden
// direction plus the all-negative constant). For moment-matched instances the
// value comes from the solver and is only certified as an upper bound.
struct OptAccounting {
    double value = 0.0;
    bool upper_bound = false;
};

// Closed-form accounting for the oracles that admit one. Throws
// argument_error for oracles without an analytic optimum (independent
// labels), so callers that report best-effort should catch it.
OptAccounting estimate_opt(const LabeledOracle& oracle);

struct ErrorReport {
    double r_plus = 0.0;
    double r_minus = 0.0;
    double half_width = 0.0;  // two-sided 99% Hoeffding bound, shared by both rates
    double opt = std::numeric_limits<double>::quiet_NaN();
    bool opt_known = false;
    bool opt_upper_bound = false;
    std::size_t n_eval = 0;
    double epsilon = 0.0;
    bool passed = false;  // r_plus <= eps + hw and r_minus <= opt + eps + hw
};

// Monte Carlo rates over oracle indices [begin, begin + n). The default base
// keeps evaluation draws disjoint from everything the learners consume. When
// the oracle has no optimum accounting, the pass criterion treats the
// optimum as zero, which only makes the test stricter.
ErrorReport estimate_errors(const Hypothesis& h, const LabeledOracle& oracle, std::size_t n,
                            double eps, std::uint64_t begin = std::uint64_t{1} << 56);

struct SweepSpec {
    std::vector<int> dims = {5};
    std::vector<double> epsilons = {0.1};
    std::vector<double> alphas = {0.3};  // truth positive mass
    std::vector<CorruptionPolicy> policies = {CorruptionPolicy::none_policy()};
    std::vector<std::uint64_t> seeds = {1};
    LearnerConfig config;
    std::size_t n_eval = 1000000;
    int jobs = 0;  // 0 keeps the runtime default thread count
};

// One sweep cell: the instance axes, what the learner did, and the held-out
// error estimates. `seconds` is wall clock and exempt from determinism;
// `error` is nonempty when the cell threw and the other result fields are
// then meaningless.
struct RunReport {
    int d = 0;
    double epsilon = 0.0;
    double alpha = 0.0;
    std::string policy;
    double rho = 0.0;
    double band_lo = 0.0;
    double band_hi = 0.0;
    double width = 0.0;
    std::uint64_t seed = 0;
    std::string stage;
    std::string kind;
    double t_truth = std::numeric_limits<double>::quiet_NaN();
    double t_learned = std::numeric_limits<double>::quiet_NaN();
    int alphas_tried = 0;
    int walk_restarts = 0;
    double r_plus = 0.0;
    double r_minus = 0.0;
    double half_width = 0.0;
    double opt = std::numeric_limits<double>::quiet_NaN();
    bool opt_known = false;
    bool opt_upper_bound = false;
    bool passed = false;
    std::size_t n_eval = 0;
    double seconds = 0.0;
    std::string error;
};

std::string policy_label(const CorruptionPolicy& policy);
std::string kind_label(const Hypothesis& h);

// Full grid product over the spec axes. Cells run concurrently; rows come
// back indexed by cell order and are reproducible apart from `seconds`. A
// throwing cell records its message and the sweep continues.
std::vector<RunReport> run_sweep(const SweepSpec& spec);

}  // namespace rhl
