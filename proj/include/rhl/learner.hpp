#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rhl/instances.hpp"

namespace rhl {

struct Hypothesis {
    enum class Kind { halfspace, const_plus, const_minus };

    Kind kind = Kind::const_minus;
    Halfspace h;  // meaningful only when kind == halfspace; w unit-norm

    int predict(const double* x) const {
        if (kind == Kind::const_plus) return 1;
        if (kind == Kind::const_minus) return -1;
        return h.label(x);
    }

    static Hypothesis halfspace_hypothesis(Halfspace hs);  // normalizes w
    static Hypothesis constant(int sign) {
        Hypothesis out;
        out.kind = sign > 0 ? Kind::const_plus : Kind::const_minus;
        return out;
    }
};

// Three-valued predictor built from a positive-reliable and a
// negative-reliable hypothesis: +1 where both say +1, -1 where both say -1,
// 0 (abstain) otherwise.
struct SandwichHypothesis {
    Hypothesis h_plus;
    Hypothesis h_minus;
};

SandwichHypothesis sandwich_combine(Hypothesis h_plus, Hypothesis h_minus);
int sandwich_predict(const SandwichHypothesis& s, const double* x);

struct LearnerConfig {
    double epsilon = 0.1;  // target excess error (CLI default; ops take it explicitly)
    double alpha = std::numeric_limits<double>::quiet_NaN();  // known bias when finite
    double zeta = 0.2;          // correlation step; NaN switches to the regime formula
    double zeta_exp_known = 1.0;   // regime formula exponent for small thresholds
    double zeta_exp_poly = 1.0;    // regime formula exponent for the poly branch
    int restart_budget = 32;       // outer walk restarts
    int inner_repeats = 100;       // updates per step-size level (~ 4 / zeta^2)
    std::size_t batch = 2000;      // conditioned samples per direction estimate
    double delta = 0.01;           // per-check failure probability
    int max_order = 4;             // highest Chow tensor order (k)
    double tau_thr = 0.05;         // singular value threshold factor
    double alpha_step = std::numeric_limits<double>::quiet_NaN();  // NaN -> epsilon/3
    int walk_restarts_per_alpha = 1;  // restart budget per bias guess in the descent
    double easycase_exponent = 2.0;  // negatives drawn: (d/epsilon)^exponent
    int easycase_iters = 10000;      // projected subgradient iterations
    std::uint64_t seed = 0;          // CLI default; ops take the seed explicitly
    std::vector<double> trace_truth;  // optional truth direction, logged in traces
};

// Step size for the walk; cfg.zeta when finite, otherwise the regime rule
// zeta = log(1/eps)^(-c * t^2) when t^2 <= log log(1/eps), else eps^c'.
double resolve_zeta(const LearnerConfig& cfg, double eps, double t);

struct CheckResult {
    bool pass = false;
    double estimate = 0.0;
    std::size_t samples = 0;
};

// Empirical false-positive check: draws ceil(8 ln(2/delta) / eps_half^2)
// samples and passes iff the empirical R+ is at most eps_half. Two-sided
// Hoeffding half-width eps_half/2 at confidence delta.
CheckResult check_false_positive(const Hypothesis& h, const LabeledOracle& oracle, double eps_half,
                                 double delta, std::uint64_t* cursor = nullptr);

// w <- (w + lambda v) / |w + lambda v| for unit v orthogonal to unit w.
std::vector<double> update_direction(const std::vector<double>& w, const std::vector<double>& v,
                                     double lambda);

// Rejection sampler for the band {<w, x> >= t}, emitting complement
// coordinates: (x - <w,x> w) expressed in a fixed orthonormal basis of
// w's complement, in d-1 dimensions. The x-marginal of the output is exactly
// N(0, I_{d-1}). Raw draws advance the shared cursor so repeated calls and
// other consumers of the same oracle never reuse an index.
class BandConditionedSampler {
  public:
    BandConditionedSampler(const LabeledOracle& base, std::vector<double> w, double t,
                           std::uint64_t* cursor = nullptr);

    int dim() const { return static_cast<int>(w_.size()) - 1; }
    double acceptance() const { return acceptance_; }  // analytic band mass
    const std::vector<double>& complement() const { return basis_; }

    SampleBatch next(std::size_t count);

    // Lifts a complement-coordinate vector back to R^d (orthogonal to w).
    std::vector<double> lift(const std::vector<double>& v) const;

  private:
    const LabeledOracle& base_;
    std::vector<double> w_;
    double t_;
    std::vector<double> basis_;  // d x (d-1) column-major
    double acceptance_;
    std::uint64_t own_cursor_ = 0;
    std::uint64_t* cursor_;
};

BandConditionedSampler band_condition(const LabeledOracle& oracle, const std::vector<double>& w,
                                      double t, std::uint64_t* cursor = nullptr);

// min over the unit ball of max_i <w, points_i>, by projected subgradient
// with Polyak steps against a running dual lower bound, plus suffix
// averaging. points is m x d row-major.
struct MinimaxResult {
    std::vector<double> w;   // raw minimizer estimate, |w| <= 1 (possibly tiny)
    double value = 0.0;      // max_i <w, x_i> at the returned w
    double dual_bound = 0.0; // certified lower bound on the optimum
};

MinimaxResult minimax_unit_ball(const std::vector<double>& points, int d, int iters);

// Convex-program learner for negatively biased targets: draws negatives,
// minimizes the max inner product over the unit ball, and thresholds at the
// attained value. Returns const_plus when negatives are too rare and
// const_minus when the program degenerates (no separating direction).
Hypothesis easycase_learn(const LabeledOracle& oracle, double eps, std::uint64_t seed,
                          const LearnerConfig& cfg = {}, std::uint64_t* cursor = nullptr);

struct WalkTraceRow {
    int restart = 0;
    int t_sign = 0;   // -1: t = quantile(alpha), +1: t = -quantile(alpha)
    int level = 0;
    double lambda = 0.0;
    double r_plus_cheap = 0.0;
    bool confirmed = false;
    double correlation = std::numeric_limits<double>::quiet_NaN();
};

struct WalkResult {
    Hypothesis hypothesis;
    bool exhausted = false;  // const_minus because every restart failed
    int restarts_used = 0;
    std::vector<WalkTraceRow> trace;
};

// Spectral random-walk learner at a known bias guess alpha. Tries both
// thresholds +-quantile(alpha) (negative first), restarts up to the budget,
// and returns the passing hypothesis with the smallest threshold, const_plus
// when negatives are rare, or exhausted const_minus.
WalkResult random_walk_learn(const LabeledOracle& oracle, double eps, double alpha,
                             const LearnerConfig& cfg, std::uint64_t seed,
                             std::uint64_t* cursor = nullptr);

struct LearnResult {
    Hypothesis hypothesis;
    std::string stage;       // "bias-shortcut", "easycase", "walk", "exhausted"
    bool walk_exhausted = false;
    int alphas_tried = 0;
    int walk_restarts = 0;  // total across the whole bias descent
    double alpha_used = std::numeric_limits<double>::quiet_NaN();
    std::vector<WalkTraceRow> trace;  // trace of the returned walk, if any
};

// Full unknown-bias learner: large-eps constant shortcut, easy-case convex
// program, then the walk over a descending bias grid. Always returns a
// hypothesis whose false-positive clause holds empirically.
LearnResult reliable_learn(const LabeledOracle& oracle, double eps, const LearnerConfig& cfg,
                           std::uint64_t seed);

}  // namespace rhl
