#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "rhl/common.hpp"
#include "rhl/gaussian.hpp"
#include "rhl/rng.hpp"

namespace rhl {

// Halfspace hypothesis x -> sign(<w, x> - t), with sign(0) = +1.
struct Halfspace {
    std::vector<double> w;
    double t = 0.0;

    int label(const double* x) const {
        return dot(w.data(), x, static_cast<int>(w.size())) >= t ? +1 : -1;
    }
};

// Label corruption applied on top of a ground-truth halfspace. The moment
// matched kind is distribution level and cannot be realized as a pointwise
// flip; it is produced by the embedding oracle instead.
struct CorruptionPolicy {
    enum class Kind { none, flip_prob, flip_all_negatives, threshold_band, moment_matched };

    Kind kind = Kind::none;
    double rho = 0.0;          // flip_prob: chance a negative flips to +1
    bool whole_region = true;  // flip_all_negatives: everything vs a margin band
    double band_lo = 0.0;      // flip_all_negatives band in the margin <w*, x>
    double band_hi = 0.0;
    double width = 0.0;  // threshold_band: flips margins in [t - width, t)
    int moment_order = 0;
    bool match_mean = true;
    double c_override = std::numeric_limits<double>::quiet_NaN();

    static CorruptionPolicy none_policy() { return {}; }
    static CorruptionPolicy flip_prob_policy(double rho);
    static CorruptionPolicy flip_all_policy();
    static CorruptionPolicy flip_band_policy(double lo, double hi);
    static CorruptionPolicy threshold_band_policy(double width);
};

// Corrupted label for one draw. label_rng must be positioned deterministically
// per sample index by the caller.
int corrupt(const Halfspace& truth, const CorruptionPolicy& policy, const double* x, int y_true,
            Rng& label_rng);

struct SampleBatch {
    int d = 0;
    std::size_t count = 0;
    std::vector<double> xs;        // count rows of d
    std::vector<std::int8_t> ys;   // +1 / -1

    const double* x(std::size_t i) const { return xs.data() + i * std::size_t(d); }
};

// Stateless sample source: sample_at(i) always produces the same pair for the
// same index, independent of call order or batching. This is what makes the
// parallel estimators thread-count invariant.
class LabeledOracle {
  public:
    virtual ~LabeledOracle() = default;
    virtual int dim() const = 0;
    virtual void sample_at(std::uint64_t index, double* x_out, int* y_out) const = 0;

    SampleBatch sample_range(std::uint64_t begin, std::size_t count) const;
};

class HalfspaceOracle final : public LabeledOracle {
  public:
    HalfspaceOracle(Halfspace truth, CorruptionPolicy policy, std::uint64_t seed);

    int dim() const override { return static_cast<int>(truth_.w.size()); }
    void sample_at(std::uint64_t index, double* x_out, int* y_out) const override;

    const Halfspace& truth() const { return truth_; }
    const CorruptionPolicy& policy() const { return policy_; }
    std::uint64_t seed() const { return seed_; }

  private:
    Halfspace truth_;
    CorruptionPolicy policy_;
    std::uint64_t seed_;
};

// Labels independent of the point: y = +1 with fixed probability.
class IndependentLabelOracle final : public LabeledOracle {
  public:
    IndependentLabelOracle(int d, double p_plus, std::uint64_t seed);

    int dim() const override { return d_; }
    void sample_at(std::uint64_t index, double* x_out, int* y_out) const override;

  private:
    int d_;
    double p_plus_;
    std::uint64_t seed_;
};

// Piecewise-linear conditional-mean function on (-inf, c) with a hard pin
// g(z) = 1 for z >= c. Knots are strictly increasing and all below c;
// weights are the lumped Gaussian masses of the hat basis at the knots.
struct DiscretizedFunction {
    double c = 0.0;
    std::vector<double> knots;
    std::vector<double> values;
    std::vector<double> weights;

    double eval(double z) const;
};

// One-dimensional moment-matched instance. Two moment systems are matched at
// once for every power k <= n: the discrete sums sum_i w_i g(z_i) z_i^k over
// the quadrature rule, and the true Gaussian moments E[g(z) z^k] of the
// piecewise-linear interpolant the sampling oracle evaluates. The knot set is
// the rule's nodes below c plus refinement knots between them; the refined
// degrees of freedom absorb the gap between the two systems, which a shared
// grid cannot close inside the [-1, 1] box.
struct HardInstance1D {
    int n = 0;
    bool match_mean = true;
    double mean_target = 0.0;
    double c = 0.0;
    DiscretizedFunction fn;
    double e_g = 0.0;
    double opt = 0.0;
    double chi_plus = 0.0;
    double chi_minus = 0.0;
    double max_residual = 0.0;
    double box_violation = 0.0;
    int iterations = 0;
};

struct HardInstanceOptions {
    double c_override = std::numeric_limits<double>::quiet_NaN();
    bool match_mean = true;
    double mean_target = 0.0;  // target for E[g] when match_mean is set
    double max_gap = 0.06;     // knot refinement: split rule gaps wider than this
    double refine_lo = -6.0;   // refine only where the Gaussian mass matters
    int max_iters = 200000;
    double tol = 1e-10;
};

// Tail cutoff from the moment order: c(n) = quantile(1 - 3^{-2n} / 4).
double default_tail_cutoff(int n);

// Alternating-projection (Dykstra) solve for g. Throws infeasible_error with
// the achieved residuals when the tolerance is not reached.
HardInstance1D solve_moment_matched_g(int n, const QuadratureRule& rule,
                                      const HardInstanceOptions& opts = {});

struct HardInstanceCheck {
    double max_residual = 0.0;
    double box_violation = 0.0;
    double chi_plus = 0.0;
    double chi_minus = 0.0;
    double e_g = 0.0;
    double opt = 0.0;
};

// Recomputes every reported quantity of the instance from its grid data.
HardInstanceCheck verify_hard_instance(const HardInstance1D& inst, const QuadratureRule& rule);

// Labels drawn with Pr[y = +1 | x] = (1 + g(<e, x>)) / 2.
class MomentMatchedOracle final : public LabeledOracle {
  public:
    MomentMatchedOracle(HardInstance1D inst, std::vector<double> direction, std::uint64_t seed);

    int dim() const override { return static_cast<int>(direction_.size()); }
    void sample_at(std::uint64_t index, double* x_out, int* y_out) const override;

    double positive_probability(double z) const { return 0.5 * (1.0 + inst_.fn.eval(z)); }
    const HardInstance1D& instance() const { return inst_; }
    const std::vector<double>& direction() const { return direction_; }

  private:
    HardInstance1D inst_;
    std::vector<double> direction_;
    std::uint64_t seed_;
};

// Embeds the 1-D instance along a seed-derived random unit direction in R^d.
std::unique_ptr<MomentMatchedOracle> embed_hard_instance(const HardInstance1D& inst, int d,
                                                         std::uint64_t seed);

// Random unit vectors with pairwise |<u, v>| <= max_dot. Throws budget_error
// carrying the count achieved when the attempt budget runs out.
std::vector<std::vector<double>> near_orthogonal_set(int d, int count, double max_dot,
                                                     std::size_t attempt_budget, Rng& rng);

// Halfspace with the requested positive-side Gaussian mass along direction.
Halfspace make_biased_halfspace(std::vector<double> direction, double alpha_positive);

}  // namespace rhl
