#include "rhl/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rhl/gaussian.hpp"
#include "rhl/rng.hpp"

namespace rhl {

namespace {

// All band policies compare the raw margin <w, x>, so thresholds move to
// standard Gaussian units by dividing through the truth norm.
std::optional<OptAccounting> try_opt(const LabeledOracle& oracle) {
    if (const auto* hs = dynamic_cast<const HalfspaceOracle*>(&oracle)) {
        const Halfspace& truth = hs->truth();
        double ss = 0.0;
        for (double v : truth.w) ss += v * v;
        const double scale = std::sqrt(ss);
        if (!(scale > 0.0)) throw argument_error("truth direction must be nonzero");
        const double z_star = truth.t / scale;
        const CorruptionPolicy& p = hs->policy();
        OptAccounting out;
        switch (p.kind) {
            case CorruptionPolicy::Kind::none:
                return out;
            case CorruptionPolicy::Kind::flip_prob:
                // Any threshold above the truth's sees surviving negatives as
                // false positives, so the family bottoms out at the truth
                // threshold and pays exactly the flipped mass. With every
                // negative flipped there are no negative labels left and a
                // threshold below all the data drives both clauses to zero.
                out.value = p.rho >= 1.0 ? 0.0 : p.rho * gaussian_cdf(z_star);
                return out;
            case CorruptionPolicy::Kind::flip_all_negatives: {
                if (p.whole_region) return out;  // same as rho = 1
                const double z_hi = p.band_hi / scale;
                if (z_hi >= z_star) return out;  // band reaches the threshold: slide it down for free
                const double z_lo = std::min(p.band_lo / scale, z_star);
                out.value = std::max(gaussian_cdf(z_hi) - gaussian_cdf(z_lo), 0.0);
                return out;
            }
            case CorruptionPolicy::Kind::threshold_band:
                return out;  // band abuts the threshold from below, so it slides down for free
            case CorruptionPolicy::Kind::moment_matched:
                throw argument_error("moment matched corruption is distribution level; evaluate the embedding oracle");
        }
        throw argument_error("unknown corruption kind");
    }
    if (const auto* mm = dynamic_cast<const MomentMatchedOracle*>(&oracle)) {
        OptAccounting out;
        out.value = mm->instance().opt;
        out.upper_bound = true;  // certified over thresholds on the hidden direction only
        return out;
    }
    return std::nullopt;
}

}  // namespace

OptAccounting estimate_opt(const LabeledOracle& oracle) {
    auto got = try_opt(oracle);
    if (!got) throw argument_error("oracle has no analytic optimum accounting");
    return *got;
}

ErrorReport estimate_errors(const Hypothesis& h, const LabeledOracle& oracle, std::size_t n,
                            double eps, std::uint64_t begin) {
    if (n < 100) throw argument_error("error estimation needs at least 100 samples");
    if (!(eps > 0.0 && eps < 1.0)) throw argument_error("eps must lie in (0, 1)");
    const int d = oracle.dim();
    const long long count = static_cast<long long>(n);
    std::uint64_t false_pos = 0;
    std::uint64_t false_neg = 0;
#ifdef _OPENMP
#pragma omp parallel reduction(+ : false_pos, false_neg)
#endif
    {
        std::vector<double> x(static_cast<std::size_t>(d));
        int y = 0;
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (long long i = 0; i < count; ++i) {
            oracle.sample_at(begin + static_cast<std::uint64_t>(i), x.data(), &y);
            const int pred = h.predict(x.data());
            if (pred == 1 && y == -1) ++false_pos;
            if (pred == -1 && y == 1) ++false_neg;
        }
    }
    ErrorReport out;
    out.r_plus = static_cast<double>(false_pos) / static_cast<double>(n);
    out.r_minus = static_cast<double>(false_neg) / static_cast<double>(n);
    out.half_width = std::sqrt(std::log(2.0 / 0.01) / (2.0 * static_cast<double>(n)));
    out.n_eval = n;
    out.epsilon = eps;
    if (const auto acc = try_opt(oracle)) {
        out.opt = acc->value;
        out.opt_known = true;
        out.opt_upper_bound = acc->upper_bound;
    }
    const double opt_for_pass = out.opt_known ? out.opt : 0.0;
    out.passed = out.r_plus <= eps + out.half_width &&
                 out.r_minus <= opt_for_pass + eps + out.half_width;
    return out;
}

std::string policy_label(const CorruptionPolicy& policy) {
    switch (policy.kind) {
        case CorruptionPolicy::Kind::none: return "none";
        case CorruptionPolicy::Kind::flip_prob: return "flip_prob";
        case CorruptionPolicy::Kind::flip_all_negatives:
            return policy.whole_region ? "flip_all" : "flip_band";
        case CorruptionPolicy::Kind::threshold_band: return "threshold_band";
        case CorruptionPolicy::Kind::moment_matched: return "moment_matched";
    }
    return "unknown";
}

std::string kind_label(const Hypothesis& h) {
    switch (h.kind) {
        case Hypothesis::Kind::halfspace: return "halfspace";
        case Hypothesis::Kind::const_plus: return "const_plus";
        case Hypothesis::Kind::const_minus: return "const_minus";
    }
    return "unknown";
}

std::vector<RunReport> run_sweep(const SweepSpec& spec) {
    if (spec.dims.empty() || spec.epsilons.empty() || spec.alphas.empty() ||
        spec.policies.empty() || spec.seeds.empty()) {
        throw argument_error("sweep grid must be nonempty on every axis");
    }
    if (spec.n_eval < 100) throw argument_error("sweep evaluation count must be at least 100");

    struct Cell {
        int d;
        double eps;
        double alpha;
        const CorruptionPolicy* policy;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    cells.reserve(spec.dims.size() * spec.epsilons.size() * spec.alphas.size() *
                  spec.policies.size() * spec.seeds.size());
    for (int d : spec.dims)
        for (double eps : spec.epsilons)
            for (double alpha : spec.alphas)
                for (const CorruptionPolicy& policy : spec.policies)
                    for (std::uint64_t seed : spec.seeds) cells.push_back({d, eps, alpha, &policy, seed});

    std::vector<RunReport> rows(cells.size());
    const long long total = static_cast<long long>(cells.size());
#ifdef _OPENMP
    const int jobs = spec.jobs > 0 ? spec.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
#endif
    for (long long ci = 0; ci < total; ++ci) {
        const Cell& cell = cells[static_cast<std::size_t>(ci)];
        RunReport row;
        row.d = cell.d;
        row.epsilon = cell.eps;
        row.alpha = cell.alpha;
        row.policy = policy_label(*cell.policy);
        row.rho = cell.policy->rho;
        row.band_lo = cell.policy->band_lo;
        row.band_hi = cell.policy->band_hi;
        row.width = cell.policy->width;
        row.seed = cell.seed;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            Rng dir_rng = derive_rng(cell.seed, stream::kSweep);
            const Halfspace truth = make_biased_halfspace(dir_rng.unit_vector(cell.d), cell.alpha);
            row.t_truth = truth.t;
            const HalfspaceOracle oracle(truth, *cell.policy, derive_seed(cell.seed, stream::kGen));
            const LearnResult lr =
                reliable_learn(oracle, cell.eps, spec.config, derive_seed(cell.seed, stream::kLearnTop));
            row.stage = lr.stage;
            row.kind = kind_label(lr.hypothesis);
            if (lr.hypothesis.kind == Hypothesis::Kind::halfspace) row.t_learned = lr.hypothesis.h.t;
            row.alphas_tried = lr.alphas_tried;
            row.walk_restarts = lr.walk_restarts;
            const ErrorReport er = estimate_errors(lr.hypothesis, oracle, spec.n_eval, cell.eps);
            row.r_plus = er.r_plus;
            row.r_minus = er.r_minus;
            row.half_width = er.half_width;
            row.opt = er.opt;
            row.opt_known = er.opt_known;
            row.opt_upper_bound = er.opt_upper_bound;
            row.passed = er.passed;
            row.n_eval = er.n_eval;
        } catch (const std::exception& ex) {
            row.error = ex.what();
            row.passed = false;
        }
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rows[static_cast<std::size_t>(ci)] = std::move(row);
    }
    return rows;
}

}  // namespace rhl
