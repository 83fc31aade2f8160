#include "rhl/instances.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace rhl {

CorruptionPolicy CorruptionPolicy::flip_prob_policy(double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw argument_error("flip probability must lie in [0, 1], got " + fmt_g9(rho));
    }
    CorruptionPolicy p;
    p.kind = Kind::flip_prob;
    p.rho = rho;
    return p;
}

CorruptionPolicy CorruptionPolicy::flip_all_policy() {
    CorruptionPolicy p;
    p.kind = Kind::flip_all_negatives;
    p.whole_region = true;
    return p;
}

CorruptionPolicy CorruptionPolicy::flip_band_policy(double lo, double hi) {
    if (!(lo < hi)) throw argument_error("flip band needs lo < hi");
    CorruptionPolicy p;
    p.kind = Kind::flip_all_negatives;
    p.whole_region = false;
    p.band_lo = lo;
    p.band_hi = hi;
    return p;
}

CorruptionPolicy CorruptionPolicy::threshold_band_policy(double width) {
    if (!(width > 0.0)) throw argument_error("threshold band width must be positive");
    CorruptionPolicy p;
    p.kind = Kind::threshold_band;
    p.width = width;
    return p;
}

int corrupt(const Halfspace& truth, const CorruptionPolicy& policy, const double* x, int y_true,
            Rng& label_rng) {
    switch (policy.kind) {
        case CorruptionPolicy::Kind::none:
            return y_true;
        case CorruptionPolicy::Kind::flip_prob:
            if (y_true == -1 && label_rng.coin(policy.rho)) return +1;
            return y_true;
        case CorruptionPolicy::Kind::flip_all_negatives: {
            if (y_true == +1) return +1;
            if (policy.whole_region) return +1;
            const double margin = dot(truth.w.data(), x, static_cast<int>(truth.w.size()));
            return (margin >= policy.band_lo && margin < policy.band_hi) ? +1 : -1;
        }
        case CorruptionPolicy::Kind::threshold_band: {
            if (y_true == +1) return +1;
            const double margin = dot(truth.w.data(), x, static_cast<int>(truth.w.size()));
            return (margin >= truth.t - policy.width && margin < truth.t) ? +1 : -1;
        }
        case CorruptionPolicy::Kind::moment_matched:
            throw argument_error(
                "moment matched corruption is distribution level; use the embedding oracle");
    }
    throw argument_error("unknown corruption kind");
}

SampleBatch LabeledOracle::sample_range(std::uint64_t begin, std::size_t count) const {
    SampleBatch batch;
    batch.d = dim();
    batch.count = count;
    batch.xs.resize(count * std::size_t(batch.d));
    batch.ys.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        int y = 0;
        sample_at(begin + i, batch.xs.data() + i * std::size_t(batch.d), &y);
        batch.ys[i] = static_cast<std::int8_t>(y);
    }
    return batch;
}

HalfspaceOracle::HalfspaceOracle(Halfspace truth, CorruptionPolicy policy, std::uint64_t seed)
    : truth_(std::move(truth)), policy_(policy), seed_(seed) {
    if (truth_.w.empty()) throw argument_error("halfspace needs a nonempty normal");
    if (policy_.kind == CorruptionPolicy::Kind::moment_matched) {
        throw argument_error(
            "moment matched corruption is distribution level; use the embedding oracle");
    }
    const double n = norm2(truth_.w.data(), static_cast<int>(truth_.w.size()));
    if (std::abs(n - 1.0) > 1e-8) {
        throw argument_error("halfspace normal must be a unit vector, norm = " + fmt_g9(n));
    }
}

void HalfspaceOracle::sample_at(std::uint64_t index, double* x_out, int* y_out) const {
    const int d = dim();
    Rng xr = derive_rng(seed_, stream::kOracleX, index);
    xr.fill_normal(x_out, d);
    const int y_true = truth_.label(x_out);
    Rng lr = derive_rng(seed_, stream::kOracleLabel, index);
    *y_out = corrupt(truth_, policy_, x_out, y_true, lr);
}

IndependentLabelOracle::IndependentLabelOracle(int d, double p_plus, std::uint64_t seed)
    : d_(d), p_plus_(p_plus), seed_(seed) {
    if (d < 1) throw argument_error("oracle dimension must be positive");
    if (!(p_plus >= 0.0 && p_plus <= 1.0)) throw argument_error("label probability out of range");
}

void IndependentLabelOracle::sample_at(std::uint64_t index, double* x_out, int* y_out) const {
    Rng xr = derive_rng(seed_, stream::kOracleX, index);
    xr.fill_normal(x_out, d_);
    Rng lr = derive_rng(seed_, stream::kOracleLabel, index);
    *y_out = lr.coin(p_plus_) ? +1 : -1;
}

double DiscretizedFunction::eval(double z) const {
    if (z >= c) return 1.0;
    if (knots.empty()) return 1.0;
    if (z <= knots.front()) return values.front();
    if (z >= knots.back()) return values.back();
    const auto it = std::upper_bound(knots.begin(), knots.end(), z);
    const std::size_t hi = std::size_t(it - knots.begin());
    const std::size_t lo = hi - 1;
    const double span = knots[hi] - knots[lo];
    const double frac = span > 0.0 ? (z - knots[lo]) / span : 0.0;
    return values[lo] + frac * (values[hi] - values[lo]);
}

double default_tail_cutoff(int n) {
    if (n < 0) throw argument_error("moment order must be nonnegative");
    return gaussian_quantile(1.0 - 0.25 * std::pow(3.0, -2.0 * n));
}

namespace {

// Upper tail integrals T_k(a) = int_a^inf z^k phi(z) dz for k = 0..n.
std::vector<double> monomial_upper_tails(int n, double a) {
    std::vector<double> t(std::size_t(n) + 1);
    t[0] = 1.0 - gaussian_cdf(a);
    if (n >= 1) t[1] = gaussian_pdf(a);
    for (int k = 2; k <= n; ++k) {
        t[std::size_t(k)] = std::pow(a, k - 1) * gaussian_pdf(a) + (k - 1) * t[std::size_t(k - 2)];
    }
    return t;
}

// Raw Gaussian moments E[z^k]: 1, 0, 1, 0, 3, 0, 15, ...
std::vector<double> gaussian_raw_moments(int n) {
    std::vector<double> m(std::size_t(n) + 1, 0.0);
    m[0] = 1.0;
    for (int k = 2; k <= n; k += 2) m[std::size_t(k)] = (k - 1) * m[std::size_t(k - 2)];
    return m;
}

// Row k - klo holds the true Gaussian moments int hat_i(z) z^k phi(z) dz of
// the hat basis: piecewise linear between knots, constant below the first
// knot, and constant from the last knot up to the pin at c.
Eigen::MatrixXd continuum_hat_rows(const std::vector<double>& knots, double c, int klo, int n) {
    const int f = static_cast<int>(knots.size());
    const int m = n - klo + 1;
    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(m, f);
    const std::vector<double> moments = gaussian_raw_moments(n);
    const std::vector<double> tails_front = monomial_upper_tails(n, knots.front());
    for (int k = klo; k <= n; ++k) {
        rows(k - klo, 0) += moments[std::size_t(k)] - tails_front[std::size_t(k)];
    }
    for (int i = 0; i + 1 < f; ++i) {
        const double a = knots[std::size_t(i)];
        const double b = knots[std::size_t(i) + 1];
        const double span = b - a;
        for (int k = klo; k <= n; ++k) {
            rows(k - klo, i) += integrate_gaussian_segment(
                a, b, [&](double z) { return (b - z) / span * std::pow(z, k); });
            rows(k - klo, i + 1) += integrate_gaussian_segment(
                a, b, [&](double z) { return (z - a) / span * std::pow(z, k); });
        }
    }
    const std::vector<double> tails_back = monomial_upper_tails(n, knots.back());
    const std::vector<double> tails_c = monomial_upper_tails(n, c);
    for (int k = klo; k <= n; ++k) {
        rows(k - klo, f - 1) += tails_back[std::size_t(k)] - tails_c[std::size_t(k)];
    }
    return rows;
}

struct ContinuumQuantities {
    double e_g = 0.0;
    double chi_plus = 0.0;
    double chi_minus = 0.0;
    double opt_base = 0.0;  // R- of the hidden-direction witness at threshold c
};

ContinuumQuantities continuum_quantities(const DiscretizedFunction& fn) {
    const std::vector<double>& z = fn.knots;
    const std::vector<double>& v = fn.values;
    const double mass_front = gaussian_cdf(z.front());
    const double tail_mass = 1.0 - gaussian_cdf(fn.c);
    const double mass_back = gaussian_cdf(fn.c) - gaussian_cdf(z.back());
    double i_e = v.front() * mass_front + v.back() * mass_back;
    double i_p = (1.0 + v.front()) * (1.0 + v.front()) * mass_front +
                 (1.0 + v.back()) * (1.0 + v.back()) * mass_back;
    double i_m = (1.0 - v.front()) * (1.0 - v.front()) * mass_front +
                 (1.0 - v.back()) * (1.0 - v.back()) * mass_back;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        const double a = z[i];
        const double b = z[i + 1];
        const double span = b - a;
        const auto interp = [&](double t) { return v[i] + (t - a) / span * (v[i + 1] - v[i]); };
        i_e += integrate_gaussian_segment(a, b, interp);
        i_p += integrate_gaussian_segment(a, b, [&](double t) {
            const double u = 1.0 + interp(t);
            return u * u;
        });
        i_m += integrate_gaussian_segment(a, b, [&](double t) {
            const double u = 1.0 - interp(t);
            return u * u;
        });
    }
    ContinuumQuantities q;
    q.e_g = i_e + tail_mass;
    const double dp = std::max((1.0 + q.e_g) * (1.0 + q.e_g), 1e-300);
    const double dm = std::max((1.0 - q.e_g) * (1.0 - q.e_g), 1e-300);
    q.chi_plus = (i_p + 4.0 * tail_mass) / dp - 1.0;
    q.chi_minus = i_m / dm - 1.0;
    q.opt_base = 0.5 * (gaussian_cdf(fn.c) + i_e);
    return q;
}

// Best threshold at or beyond the pin: R-(t) grows by the band mass, so the
// scan is a formality, but it keeps the report honest for odd inputs.
double best_tail_threshold_risk(const DiscretizedFunction& fn, const QuadratureRule& rule,
                                double opt_base) {
    double best = opt_base;
    for (double t : rule.nodes) {
        if (t < fn.c) continue;
        best = std::min(best, opt_base + (gaussian_cdf(t) - gaussian_cdf(fn.c)));
    }
    return best;
}

}  // namespace

HardInstance1D solve_moment_matched_g(int n, const QuadratureRule& rule,
                                      const HardInstanceOptions& opts) {
    if (n < 0 || n > 8) throw argument_error("moment order must be in [0, 8]");
    const double c = std::isnan(opts.c_override) ? default_tail_cutoff(n) : opts.c_override;
    const std::size_t grid = rule.size();
    if (grid < 8) throw argument_error("moment matching needs a denser quadrature rule");
    if (c > rule.nodes.back()) {
        throw argument_error("tail pin c = " + fmt_g9(c) + " lies beyond the quadrature range");
    }
    if (opts.match_mean && !(std::abs(opts.mean_target) < 1.0)) {
        throw argument_error("mean target must lie strictly inside (-1, 1)");
    }
    if (!(opts.max_gap > 0.0)) throw argument_error("knot refinement gap must be positive");

    std::vector<int> free_idx;
    for (std::size_t i = 0; i < grid; ++i) {
        if (rule.nodes[i] < c) free_idx.push_back(static_cast<int>(i));
    }
    if (free_idx.empty()) throw argument_error("tail pin leaves no adjustable nodes");

    // Knot set: the rule's nodes below c, with wide gaps split where the
    // Gaussian mass matters. The extra knots are what lets the discrete sums
    // and the true moments of the interpolant be matched at the same time.
    std::vector<double> knots;
    std::vector<int> rule_pos(free_idx.size());
    for (std::size_t i = 0; i < free_idx.size(); ++i) {
        rule_pos[i] = static_cast<int>(knots.size());
        const double a = rule.nodes[std::size_t(free_idx[i])];
        knots.push_back(a);
        if (i + 1 < free_idx.size()) {
            const double b = rule.nodes[std::size_t(free_idx[i + 1])];
            if (b > opts.refine_lo && b - a > opts.max_gap) {
                const double lo = std::max(a, opts.refine_lo);
                const int pieces = static_cast<int>(std::ceil((b - lo) / opts.max_gap));
                for (int j = 1; j < pieces; ++j) knots.push_back(lo + (b - lo) * j / pieces);
            }
        }
    }
    const int f = static_cast<int>(knots.size());

    const int klo = opts.match_mean ? 0 : 1;
    const int m = n - klo + 1;  // may be zero when n == 0 without mean matching
    const double mean = opts.match_mean ? opts.mean_target : 0.0;

    const Eigen::MatrixXd mass_row = continuum_hat_rows(knots, c, 0, 0);

    HardInstance1D inst;
    inst.n = n;
    inst.match_mean = opts.match_mean;
    inst.mean_target = mean;
    inst.c = c;
    inst.fn.c = c;
    inst.fn.knots = knots;
    inst.fn.weights.assign(mass_row.data(), mass_row.data() + f);

    Eigen::VectorXd g = Eigen::VectorXd::Zero(f);
    double res = 0.0;
    if (m > 0) {
        // Row block one: discrete sums over the rule, sum_i w_i g(z_i) z_i^k,
        // which only touch the rule-node coordinates. Row block two: the true
        // moments E[g(z) z^k] of the interpolant. Targets follow E[g] = mean
        // times the raw Gaussian moments, so every Hermite moment above the
        // mean vanishes.
        const std::vector<double> moments = gaussian_raw_moments(n);
        Eigen::MatrixXd a_nat = Eigen::MatrixXd::Zero(2 * m, f);
        Eigen::VectorXd b_nat(2 * m);
        for (int k = klo; k <= n; ++k) {
            double tail_part = 0.0;
            for (std::size_t i = 0; i < grid; ++i) {
                const double z = rule.nodes[i];
                if (z < c) {
                    continue;
                }
                tail_part += rule.weights[i] * std::pow(z, k);
            }
            for (std::size_t i = 0; i < free_idx.size(); ++i) {
                const double z = rule.nodes[std::size_t(free_idx[i])];
                a_nat(k - klo, rule_pos[i]) = rule.weights[std::size_t(free_idx[i])] * std::pow(z, k);
            }
            b_nat(k - klo) = mean * moments[std::size_t(k)] - tail_part;
        }
        a_nat.bottomRows(m) = continuum_hat_rows(knots, c, klo, n);
        const std::vector<double> tails_c = monomial_upper_tails(n, c);
        for (int k = klo; k <= n; ++k) {
            b_nat(m + k - klo) = mean * moments[std::size_t(k)] - tails_c[std::size_t(k)];
        }

        // Dykstra in coordinates whitened by the lumped Gaussian masses: the
        // affine projection then reproduces the L2(gaussian) geometry and the
        // box projection stays a pointwise clamp.
        Eigen::VectorXd s(f);
        for (int j = 0; j < f; ++j) s(j) = std::max(std::sqrt(mass_row(0, j)), 1e-200);
        Eigen::MatrixXd a_wht = a_nat * s.cwiseInverse().asDiagonal();
        Eigen::VectorXd b_wht = b_nat;
        for (int r = 0; r < 2 * m; ++r) {
            const double scale = a_wht.row(r).norm();
            if (scale < 1e-300) throw numeric_error("moment constraint row vanished");
            a_wht.row(r) /= scale;
            b_wht(r) /= scale;
        }
        const Eigen::MatrixXd mt = a_wht.transpose();  // f x 2m
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(mt);
        const Eigen::MatrixXd q_thin =
            qr.householderQ() * Eigen::MatrixXd::Identity(f, 2 * m);
        const Eigen::MatrixXd r_mat = qr.matrixQR().topRows(2 * m);
        double diag_min = std::numeric_limits<double>::infinity();
        double diag_max = 0.0;
        for (int r = 0; r < 2 * m; ++r) {
            diag_min = std::min(diag_min, std::abs(r_mat(r, r)));
            diag_max = std::max(diag_max, std::abs(r_mat(r, r)));
        }
        if (diag_min < 1e-12 * diag_max) {
            throw numeric_error("moment constraint rows are degenerate");
        }
        const auto project_affine = [&](Eigen::VectorXd& u) {
            const Eigen::VectorXd gap = mt.transpose() * u - b_wht;
            const Eigen::VectorXd beta =
                r_mat.triangularView<Eigen::Upper>().transpose().solve(gap);
            u -= q_thin * beta;
        };

        Eigen::VectorXd u = Eigen::VectorXd::Zero(f);
        Eigen::VectorXd p = Eigen::VectorXd::Zero(f);
        Eigen::VectorXd q = Eigen::VectorXd::Zero(f);
        res = (a_nat * g - b_nat).cwiseAbs().maxCoeff();
        int iter = 0;
        for (; iter < opts.max_iters && res > opts.tol; ++iter) {
            Eigen::VectorXd y = u + p;
            project_affine(y);
            p = u + p - y;
            const Eigen::VectorXd z = y + q;
            u = z.cwiseMax(-s).cwiseMin(s);
            q = z - u;
            g = u.cwiseQuotient(s);
            res = (a_nat * g - b_nat).cwiseAbs().maxCoeff();
        }
        inst.iterations = iter;
        if (res > opts.tol) {
            throw infeasible_error("moment matching did not converge: residual " + fmt_g9(res),
                                   res, 0.0);
        }
    }

    inst.fn.values.assign(g.data(), g.data() + f);
    const ContinuumQuantities cq = continuum_quantities(inst.fn);
    inst.e_g = cq.e_g;
    inst.chi_plus = cq.chi_plus;
    inst.chi_minus = cq.chi_minus;
    inst.opt = best_tail_threshold_risk(inst.fn, rule, cq.opt_base);
    inst.max_residual = res;
    double box = 0.0;
    for (double v : inst.fn.values) box = std::max(box, std::abs(v) - 1.0);
    inst.box_violation = std::max(box, 0.0);
    return inst;
}

HardInstanceCheck verify_hard_instance(const HardInstance1D& inst, const QuadratureRule& rule) {
    const std::vector<double>& knots = inst.fn.knots;
    if (knots.empty() || knots.size() != inst.fn.values.size()) {
        throw argument_error("instance function has no usable knot grid");
    }
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (!(knots[i] < knots[i + 1])) throw argument_error("instance knots must increase");
    }
    if (!(knots.back() < inst.c)) throw argument_error("instance knots must stay below the pin");
    for (double z : rule.nodes) {
        if (z >= inst.c) continue;
        const auto it = std::lower_bound(knots.begin(), knots.end(), z - 1e-9);
        if (it == knots.end() || std::abs(*it - z) > 1e-9) {
            throw argument_error("instance knots do not cover the quadrature rule");
        }
    }

    HardInstanceCheck check;
    // Discrete system: sums over the rule with the interpolant's values.
    const std::vector<double> moments = gaussian_raw_moments(inst.n);
    const double mean = inst.match_mean ? inst.mean_target : 0.0;
    const int klo = inst.match_mean ? 0 : 1;
    for (int k = klo; k <= inst.n; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) {
            acc += rule.weights[i] * inst.fn.eval(rule.nodes[i]) * std::pow(rule.nodes[i], k);
        }
        check.max_residual =
            std::max(check.max_residual, std::abs(acc - mean * moments[std::size_t(k)]));
    }
    // Continuum system: true Gaussian moments of the interpolant.
    if (inst.n >= klo) {
        const Eigen::MatrixXd rows = continuum_hat_rows(knots, inst.c, klo, inst.n);
        const Eigen::Map<const Eigen::VectorXd> vals(inst.fn.values.data(),
                                                     static_cast<int>(inst.fn.values.size()));
        const std::vector<double> tails_c = monomial_upper_tails(inst.n, inst.c);
        for (int k = klo; k <= inst.n; ++k) {
            const double got = rows.row(k - klo) * vals + tails_c[std::size_t(k)];
            check.max_residual =
                std::max(check.max_residual, std::abs(got - mean * moments[std::size_t(k)]));
        }
    }
    for (double v : inst.fn.values) {
        check.box_violation = std::max(check.box_violation, std::abs(v) - 1.0);
    }
    check.box_violation = std::max(check.box_violation, 0.0);
    const ContinuumQuantities cq = continuum_quantities(inst.fn);
    check.chi_plus = cq.chi_plus;
    check.chi_minus = cq.chi_minus;
    check.e_g = cq.e_g;
    check.opt = best_tail_threshold_risk(inst.fn, rule, cq.opt_base);
    return check;
}

MomentMatchedOracle::MomentMatchedOracle(HardInstance1D inst, std::vector<double> direction,
                                         std::uint64_t seed)
    : inst_(std::move(inst)), direction_(std::move(direction)), seed_(seed) {
    if (direction_.empty()) throw argument_error("embedding needs a direction");
    const double n = norm2(direction_.data(), static_cast<int>(direction_.size()));
    if (std::abs(n - 1.0) > 1e-8) throw argument_error("embedding direction must be unit length");
}

void MomentMatchedOracle::sample_at(std::uint64_t index, double* x_out, int* y_out) const {
    const int d = dim();
    Rng xr = derive_rng(seed_, stream::kOracleX, index);
    xr.fill_normal(x_out, d);
    const double z = dot(direction_.data(), x_out, d);
    Rng lr = derive_rng(seed_, stream::kOracleLabel, index);
    *y_out = lr.coin(positive_probability(z)) ? +1 : -1;
}

std::unique_ptr<MomentMatchedOracle> embed_hard_instance(const HardInstance1D& inst, int d,
                                                         std::uint64_t seed) {
    if (d < 1) throw argument_error("embedding dimension must be positive");
    Rng rng = derive_rng(seed, stream::kEmbed, 0);
    return std::make_unique<MomentMatchedOracle>(inst, rng.unit_vector(d), seed);
}

std::vector<std::vector<double>> near_orthogonal_set(int d, int count, double max_dot,
                                                     std::size_t attempt_budget, Rng& rng) {
    if (d < 1 || count < 1) throw argument_error("near orthogonal set needs d >= 1, count >= 1");
    if (!(max_dot > 0.0)) throw argument_error("near orthogonal tolerance must be positive");
    std::vector<std::vector<double>> out;
    std::size_t attempts = 0;
    while (out.size() < std::size_t(count)) {
        if (attempts >= attempt_budget) {
            throw budget_error("near orthogonal set budget exhausted", out.size());
        }
        ++attempts;
        std::vector<double> v = rng.unit_vector(d);
        bool ok = true;
        for (const auto& u : out) {
            if (std::abs(dot(u.data(), v.data(), d)) > max_dot) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(std::move(v));
    }
    return out;
}

Halfspace make_biased_halfspace(std::vector<double> direction, double alpha_positive) {
    if (!(alpha_positive > 0.0 && alpha_positive < 1.0)) {
        throw argument_error("positive mass must lie strictly inside (0, 1)");
    }
    if (direction.empty()) throw argument_error("halfspace needs a direction");
    normalize(direction);
    Halfspace h;
    h.w = std::move(direction);
    h.t = gaussian_quantile(1.0 - alpha_positive);
    return h;
}

}  // namespace rhl
