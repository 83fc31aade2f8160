#include "rhl/learner.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "rhl/chow.hpp"
#include "rhl/gaussian.hpp"
#include "rhl/rng.hpp"

namespace rhl {

namespace {

constexpr double kOrthoTol = 1e-8;
constexpr double kUnitTol = 1e-9;
constexpr double kLambdaFloorDivisor = 100.0;  // walk stops once lambda <= eps / this
constexpr double kMinBandAcceptance = 1e-6;
constexpr double kDegenerateNorm = 0.05;   // minimax iterate below this has no direction
constexpr double kAlphaFloor = 0.01;       // smallest bias guess in the descent
constexpr std::size_t kScreenCoarse = 400;   // first-stage screen before the pinned check
constexpr std::size_t kScreenFine = 2000;    // second-stage screen
constexpr std::size_t kEasycaseNegativesCap = 1000000;

void validate_eps(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw argument_error("eps must lie in (0, 1)");
}

void validate_config(const LearnerConfig& cfg) {
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw argument_error("delta must lie in (0, 1)");
    if (cfg.restart_budget < 1) throw argument_error("restart budget must be at least 1");
    if (cfg.inner_repeats < 1) throw argument_error("inner repeat count must be at least 1");
    if (cfg.walk_restarts_per_alpha < 1) throw argument_error("per-alpha restart budget must be at least 1");
    if (cfg.batch < 1) throw argument_error("batch size must be at least 1");
    if (cfg.max_order < 1) throw argument_error("tensor order cap must be at least 1");
    if (!(cfg.tau_thr > 0.0)) throw argument_error("singular value threshold must be positive");
    if (cfg.easycase_iters < 1) throw argument_error("easy case iteration budget must be at least 1");
    if (!(cfg.easycase_exponent > 0.0)) throw argument_error("easy case exponent must be positive");
}

std::size_t pinned_check_count(double eps_half, double delta) {
    return static_cast<std::size_t>(
        std::ceil(8.0 * std::log(2.0 / delta) / (eps_half * eps_half)));
}

// Empirical Pr[y == -1] on n fresh samples starting at the cursor.
double negative_rate(const LabeledOracle& oracle, std::size_t n, std::uint64_t& cursor) {
    std::vector<double> x(static_cast<std::size_t>(oracle.dim()));
    std::size_t neg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        int y = 0;
        oracle.sample_at(cursor + i, x.data(), &y);
        neg += y == -1 ? 1 : 0;
    }
    cursor += n;
    return static_cast<double>(neg) / static_cast<double>(n);
}

// Empirical R+ of h on n fresh samples.
double false_positive_rate(const Hypothesis& h, const LabeledOracle& oracle, std::size_t n,
                           std::uint64_t& cursor) {
    std::vector<double> x(static_cast<std::size_t>(oracle.dim()));
    std::size_t bad = 0;
    for (std::size_t i = 0; i < n; ++i) {
        int y = 0;
        oracle.sample_at(cursor + i, x.data(), &y);
        if (y == -1 && h.predict(x.data()) == 1) ++bad;
    }
    cursor += n;
    return static_cast<double>(bad) / static_cast<double>(n);
}

}  // namespace

Hypothesis Hypothesis::halfspace_hypothesis(Halfspace hs) {
    if (hs.w.empty()) throw argument_error("halfspace needs a direction");
    if (!std::isfinite(hs.t)) throw argument_error("halfspace threshold must be finite");
    normalize(hs.w);
    Hypothesis out;
    out.kind = Kind::halfspace;
    out.h = std::move(hs);
    return out;
}

SandwichHypothesis sandwich_combine(Hypothesis h_plus, Hypothesis h_minus) {
    return {std::move(h_plus), std::move(h_minus)};
}

int sandwich_predict(const SandwichHypothesis& s, const double* x) {
    const int p = s.h_plus.predict(x);
    const int m = s.h_minus.predict(x);
    if (p == 1 && m == 1) return 1;
    if (p == -1 && m == -1) return -1;
    return 0;
}

double resolve_zeta(const LearnerConfig& cfg, double eps, double t) {
    if (!std::isnan(cfg.zeta)) {
        if (!(cfg.zeta > 0.0 && cfg.zeta < 1.0)) throw argument_error("zeta must lie in (0, 1)");
        return cfg.zeta;
    }
    validate_eps(eps);
    const double log_inv = std::log(1.0 / eps);
    const double loglog = std::log(std::max(log_inv, 1.0 + 1e-9));
    const double t2 = t * t;
    double zeta = t2 <= loglog ? std::pow(log_inv, -cfg.zeta_exp_known * t2)
                               : std::pow(eps, cfg.zeta_exp_poly);
    // Keep the step usable at desk scale: above the walk's lambda floor and
    // small enough that a single update cannot overshoot.
    return std::min(0.5, std::max(zeta, eps / 10.0));
}

CheckResult check_false_positive(const Hypothesis& h, const LabeledOracle& oracle, double eps_half,
                                 double delta, std::uint64_t* cursor) {
    if (!(eps_half > 0.0 && eps_half < 1.0)) throw argument_error("eps_half must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw argument_error("delta must lie in (0, 1)");
    std::uint64_t own = 0;
    std::uint64_t& cur = cursor != nullptr ? *cursor : own;
    CheckResult out;
    out.samples = pinned_check_count(eps_half, delta);
    out.estimate = false_positive_rate(h, oracle, out.samples, cur);
    out.pass = out.estimate <= eps_half;
    return out;
}

std::vector<double> update_direction(const std::vector<double>& w, const std::vector<double>& v,
                                     double lambda) {
    if (w.empty() || w.size() != v.size()) throw argument_error("direction vectors must share a dimension");
    const int d = static_cast<int>(w.size());
    if (std::abs(norm2(w.data(), d) - 1.0) > kUnitTol) throw argument_error("w must be unit length");
    if (std::abs(norm2(v.data(), d) - 1.0) > kUnitTol) throw argument_error("v must be unit length");
    if (!(lambda >= 0.0)) throw argument_error("lambda must be nonnegative");
    if (std::abs(dot(w.data(), v.data(), d)) > kOrthoTol)
        throw argument_error("v must be orthogonal to w");
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] + lambda * v[i];
    normalize(out);
    return out;
}

BandConditionedSampler::BandConditionedSampler(const LabeledOracle& base, std::vector<double> w,
                                               double t, std::uint64_t* cursor)
    : base_(base), w_(std::move(w)), t_(t), cursor_(cursor != nullptr ? cursor : &own_cursor_) {
    const int d = base_.dim();
    if (static_cast<int>(w_.size()) != d) throw argument_error("direction dimension mismatch");
    if (d < 2) throw argument_error("band conditioning needs dimension >= 2");
    if (std::abs(norm2(w_.data(), d) - 1.0) > kUnitTol) throw argument_error("w must be unit length");
    if (!std::isfinite(t_)) throw argument_error("band threshold must be finite");
    acceptance_ = 1.0 - gaussian_cdf(t_);
    if (acceptance_ < kMinBandAcceptance)
        throw band_error("band acceptance probability below 1e-6, threshold too large");
    basis_ = complement_basis(w_);
}

SampleBatch BandConditionedSampler::next(std::size_t count) {
    const int d = base_.dim();
    const int dc = d - 1;
    SampleBatch out;
    out.d = dc;
    out.xs.reserve(count * static_cast<std::size_t>(dc));
    out.ys.reserve(count);
    std::vector<double> x(static_cast<std::size_t>(d));
    // Statistical safety margin over the expected raw draw count; hitting it
    // means the oracle's band mass disagrees wildly with the Gaussian model.
    const std::uint64_t budget =
        static_cast<std::uint64_t>(8.0 * static_cast<double>(count) / acceptance_) + 1024;
    std::uint64_t used = 0;
    while (out.count < count) {
        if (used++ >= budget) throw band_error("band rejection sampling exceeded its draw budget");
        int y = 0;
        base_.sample_at((*cursor_)++, x.data(), &y);
        if (dot(x.data(), w_.data(), d) - t_ < 0.0) continue;
        for (int j = 0; j < dc; ++j)
            out.xs.push_back(dot(x.data(), basis_.data() + static_cast<std::size_t>(j) * d, d));
        out.ys.push_back(static_cast<std::int8_t>(y));
        ++out.count;
    }
    return out;
}

std::vector<double> BandConditionedSampler::lift(const std::vector<double>& v) const {
    const int d = base_.dim();
    const int dc = d - 1;
    if (static_cast<int>(v.size()) != dc) throw argument_error("complement coordinate dimension mismatch");
    std::vector<double> out(static_cast<std::size_t>(d), 0.0);
    for (int j = 0; j < dc; ++j) {
        const double* col = basis_.data() + static_cast<std::size_t>(j) * d;
        for (int i = 0; i < d; ++i) out[static_cast<std::size_t>(i)] += col[i] * v[static_cast<std::size_t>(j)];
    }
    return out;
}

BandConditionedSampler band_condition(const LabeledOracle& oracle, const std::vector<double>& w,
                                      double t, std::uint64_t* cursor) {
    return BandConditionedSampler(oracle, w, t, cursor);
}

MinimaxResult minimax_unit_ball(const std::vector<double>& points, int d, int iters) {
    if (d < 1) throw argument_error("minimax needs dimension >= 1");
    if (points.empty() || points.size() % static_cast<std::size_t>(d) != 0)
        throw argument_error("point array must be m x d");
    if (iters < 1) throw argument_error("minimax needs at least one iteration");
    const std::size_t m = points.size() / static_cast<std::size_t>(d);
    const auto pt = [&](std::size_t i) { return points.data() + i * static_cast<std::size_t>(d); };

    auto objective = [&](const double* w, std::size_t* arg) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const double v = dot(w, pt(i), d);
            if (v > best) {
                best = v;
                bi = i;
            }
        }
        if (arg != nullptr) *arg = bi;
        return best;
    };

    // Dual view: min over the ball of max_i <w, x_i> equals minus the distance
    // from the origin to the convex hull of the points, and -p/|p| is an exact
    // minimizer when p is the nearest hull point. Pairwise Frank-Wolfe with
    // exact line search tracks that point; -|p| is a valid lower bound at
    // every step and the normalized iterate doubles as a primal candidate.
    std::size_t init = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (norm2(pt(i), d) < norm2(pt(init), d)) init = i;
    std::vector<double> weights(m, 0.0);
    weights[init] = 1.0;
    std::vector<std::size_t> active = {init};
    std::vector<double> p(pt(init), pt(init) + d);
    double dual = -norm2(p.data(), d);

    std::vector<double> w(static_cast<std::size_t>(d), 0.0);
    std::vector<double> suffix(static_cast<std::size_t>(d), 0.0);
    std::size_t suffix_n = 0;
    std::vector<double> best_w = w;
    double best_val = objective(w.data(), nullptr);
    std::vector<double> cand(static_cast<std::size_t>(d), 0.0);
    std::vector<double> dir(static_cast<std::size_t>(d), 0.0);

    for (int it = 1; it <= iters; ++it) {
        // Dual step: shift weight from the worst active vertex to the best
        // overall vertex, with the exact minimizing step on |p|^2.
        std::size_t i_fw = 0;
        double fw_val = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            const double v = dot(p.data(), pt(i), d);
            if (v < fw_val) {
                fw_val = v;
                i_fw = i;
            }
        }
        std::size_t aw_pos = 0;
        double aw_val = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < active.size(); ++a) {
            const double v = dot(p.data(), pt(active[a]), d);
            if (v > aw_val) {
                aw_val = v;
                aw_pos = a;
            }
        }
        const std::size_t i_aw = active[aw_pos];
        if (i_fw != i_aw) {
            for (int i = 0; i < d; ++i) dir[static_cast<std::size_t>(i)] = pt(i_fw)[i] - pt(i_aw)[i];
            const double dn2 = dot(dir.data(), dir.data(), d);
            if (dn2 > 0.0) {
                const double theta =
                    std::clamp(-dot(p.data(), dir.data(), d) / dn2, 0.0, weights[i_aw]);
                if (theta > 0.0) {
                    for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] += theta * dir[static_cast<std::size_t>(i)];
                    const bool fresh = weights[i_fw] == 0.0;
                    weights[i_fw] += theta;
                    weights[i_aw] -= theta;
                    if (fresh) active.push_back(i_fw);
                    if (weights[i_aw] <= 1e-15) {
                        weights[i_aw] = 0.0;
                        active[aw_pos] = active.back();
                        active.pop_back();
                    }
                }
            }
        }
        if ((it & 255) == 0) {
            // Refresh p from the weights to cancel drift from incremental updates.
            std::fill(p.begin(), p.end(), 0.0);
            for (const std::size_t a : active)
                for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] += weights[a] * pt(a)[i];
        }
        const double pn = norm2(p.data(), d);
        dual = std::max(dual, -pn);
        if (pn > 1e-15) {
            for (int i = 0; i < d; ++i) cand[static_cast<std::size_t>(i)] = -p[static_cast<std::size_t>(i)] / pn;
            const double cv = objective(cand.data(), nullptr);
            if (cv < best_val) {
                best_val = cv;
                best_w = cand;
            }
        }

        // Primal step: projected subgradient with a Polyak step against the
        // certified dual bound.
        std::size_t ai = 0;
        const double f = objective(w.data(), &ai);
        if (f < best_val) {
            best_val = f;
            best_w = w;
        }
        const double* g = pt(ai);
        const double gn2 = std::max(dot(g, g, d), 1e-30);
        double step = std::max(f - dual, 0.0) / gn2;
        const double max_step = 2.0 / std::sqrt(gn2);  // ball diameter
        step = std::min(step, max_step);
        for (int i = 0; i < d; ++i) w[static_cast<std::size_t>(i)] -= step * g[i];
        const double wn = norm2(w.data(), d);
        if (wn > 1.0)
            for (double& c : w) c /= wn;
        if (2 * it > iters) {
            for (int i = 0; i < d; ++i) suffix[static_cast<std::size_t>(i)] += w[static_cast<std::size_t>(i)];
            ++suffix_n;
        }
    }
    for (double& c : suffix) c /= static_cast<double>(suffix_n);
    const double suffix_val = objective(suffix.data(), nullptr);

    MinimaxResult out;
    if (suffix_val <= best_val) {
        out.w = std::move(suffix);
        out.value = suffix_val;
    } else {
        out.w = std::move(best_w);
        out.value = best_val;
    }
    out.dual_bound = dual;
    return out;
}

Hypothesis easycase_learn(const LabeledOracle& oracle, double eps, std::uint64_t seed,
                          const LearnerConfig& cfg, std::uint64_t* cursor) {
    validate_eps(eps);
    validate_config(cfg);
    const int d = oracle.dim();
    if (d < 1) throw argument_error("oracle dimension must be at least 1");
    // Standalone calls land on a seed-derived index region so different seeds
    // see different data; a shared cursor overrides this.
    std::uint64_t own = derive_seed(seed, stream::kEasycase) & ((1ull << 48) - 1);
    std::uint64_t& cur = cursor != nullptr ? *cursor : own;

    // Rare negatives: the +1 constant is reliable. Bar 3eps/4 with Hoeffding
    // half-width eps/4 separates Pr <= eps/2 from Pr >= eps at confidence delta.
    const std::size_t n1 =
        static_cast<std::size_t>(std::ceil(8.0 * std::log(2.0 / cfg.delta) / (eps * eps)));
    const double p_neg = negative_rate(oracle, n1, cur);
    if (p_neg <= 0.75 * eps) return Hypothesis::constant(+1);

    const double m_raw = std::pow(static_cast<double>(d) / eps, cfg.easycase_exponent);
    if (!(m_raw <= static_cast<double>(kEasycaseNegativesCap)))
        throw resource_error("easy case sample budget exceeds the supported cap");
    const std::size_t m = static_cast<std::size_t>(std::ceil(m_raw));

    std::vector<double> negs;
    negs.reserve(m * static_cast<std::size_t>(d));
    std::vector<double> x(static_cast<std::size_t>(d));
    const std::uint64_t budget =
        static_cast<std::uint64_t>(8.0 * static_cast<double>(m) / p_neg) + 1024;
    std::size_t got = 0;
    std::uint64_t used = 0;
    while (got < m && used < budget) {
        int y = 0;
        oracle.sample_at(cur++, x.data(), &y);
        ++used;
        if (y == -1) {
            negs.insert(negs.end(), x.begin(), x.end());
            ++got;
        }
    }
    if (got == 0) return Hypothesis::constant(+1);

    const MinimaxResult mm = minimax_unit_ball(negs, d, cfg.easycase_iters);
    const double wn = norm2(mm.w.data(), d);
    if (wn < kDegenerateNorm) return Hypothesis::constant(-1);
    Halfspace hs;
    hs.w = mm.w;
    hs.t = mm.value / wn;
    return Hypothesis::halfspace_hypothesis(std::move(hs));
}

WalkResult random_walk_learn(const LabeledOracle& oracle, double eps, double alpha,
                             const LearnerConfig& cfg, std::uint64_t seed,
                             std::uint64_t* cursor) {
    validate_eps(eps);
    validate_config(cfg);
    if (!(alpha > 0.0 && alpha <= 0.5)) throw argument_error("alpha must lie in (0, 1/2]");
    const int d = oracle.dim();
    if (d < 2) throw argument_error("the walk needs dimension >= 2");

    std::uint64_t own = derive_seed(seed, stream::kLearnTop) & ((1ull << 48) - 1);
    std::uint64_t& cur = cursor != nullptr ? *cursor : own;

    std::vector<double> truth_unit = cfg.trace_truth;
    if (!truth_unit.empty()) {
        if (static_cast<int>(truth_unit.size()) != d)
            throw argument_error("trace truth dimension mismatch");
        normalize(truth_unit);
    }

    WalkResult out;

    // Step 1: rare negatives make the +1 constant reliable. Bar 3eps/8 with
    // half-width eps/8 separates Pr <= eps/4 from Pr >= eps/2 at confidence delta.
    const std::size_t n1 =
        static_cast<std::size_t>(std::ceil(32.0 * std::log(2.0 / cfg.delta) / (eps * eps)));
    if (negative_rate(oracle, n1, cur) <= 0.375 * eps) {
        out.hypothesis = Hypothesis::constant(+1);
        return out;
    }

    const double t_mag = -gaussian_quantile(alpha);  // alpha <= 1/2 so t_mag >= 0
    const double eps_half = 0.5 * eps;
    const double lambda_floor = eps / kLambdaFloorDivisor;
    std::vector<Halfspace> passers;

    for (const int t_sign : {-1, +1}) {  // negative threshold first
        const double t = t_sign < 0 ? -t_mag : t_mag;
        bool passed = false;
        for (int restart = 0; restart < cfg.restart_budget && !passed; ++restart) {
            ++out.restarts_used;
            const std::uint64_t run_idx =
                static_cast<std::uint64_t>(restart) * 2 + (t_sign > 0 ? 1 : 0);
            Rng init_rng = derive_rng(seed, stream::kWalkInit, run_idx);
            std::vector<double> w = init_rng.unit_vector(d);
            Rng coin_rng = derive_rng(seed, stream::kWalkCoin, run_idx);
            double lambda = resolve_zeta(cfg, eps, t);
            std::uint64_t iter = 0;
            for (int level = 0; lambda > lambda_floor && !passed; ++level, lambda *= 0.5) {
                for (int rep = 0; rep < cfg.inner_repeats; ++rep, ++iter) {
                    Hypothesis cand;
                    cand.kind = Hypothesis::Kind::halfspace;
                    cand.h = Halfspace{w, t};

                    WalkTraceRow row;
                    row.restart = restart;
                    row.t_sign = t_sign;
                    row.level = level;
                    row.lambda = lambda;
                    if (!truth_unit.empty()) row.correlation = dot(w.data(), truth_unit.data(), d);

                    // 2a: staged screens reject cheaply; only the pinned
                    // check can accept.
                    row.r_plus_cheap = false_positive_rate(cand, oracle, kScreenCoarse, cur);
                    if (row.r_plus_cheap <= eps) {
                        row.r_plus_cheap = false_positive_rate(cand, oracle, kScreenFine, cur);
                        if (row.r_plus_cheap <= eps_half) {
                            const CheckResult confirm =
                                check_false_positive(cand, oracle, eps_half, cfg.delta, &cur);
                            if (confirm.pass) {
                                row.confirmed = true;
                                out.trace.push_back(row);
                                passers.push_back(cand.h);
                                passed = true;
                                break;
                            }
                        }
                    }
                    out.trace.push_back(row);

                    // 2b: sign coin, band conditioning, spectral candidate, update.
                    if (coin_rng.coin(0.5))
                        for (double& c : w) c = -c;
                    BandConditionedSampler band(oracle, w, t, &cur);
                    const SampleBatch cond = band.next(cfg.batch);
                    DirectionParams dp;
                    dp.max_order = cfg.max_order;
                    dp.tau_thr = cfg.tau_thr;
                    const std::uint64_t dseed =
                        derive_seed(seed, stream::kWalkBatch, (run_idx << 24) + iter);
                    const std::vector<double> v = band.lift(candidate_direction(cond, dp, dseed));
                    w = update_direction(w, v, lambda);
                }
            }
        }
        // A pass at the negative threshold already wins step 4's argmin-t,
        // so the positive pass is skipped.
        if (passed) break;
    }

    if (!passers.empty()) {
        const Halfspace* best = &passers.front();
        for (const Halfspace& h : passers)
            if (h.t < best->t) best = &h;
        out.hypothesis = Hypothesis::halfspace_hypothesis(*best);
        return out;
    }
    out.hypothesis = Hypothesis::constant(-1);
    out.exhausted = true;
    return out;
}

LearnResult reliable_learn(const LabeledOracle& oracle, double eps, const LearnerConfig& cfg,
                           std::uint64_t seed) {
    validate_eps(eps);
    validate_config(cfg);
    const double step = std::isnan(cfg.alpha_step) ? eps / 3.0 : cfg.alpha_step;
    if (!(step > 0.0 && step < 0.5)) throw argument_error("alpha step must lie in (0, 1/2)");
    const int d = oracle.dim();
    if (d < 2) throw argument_error("reliable learning needs dimension >= 2");

    std::uint64_t cursor = 0;
    LearnResult out;

    // (1) Large-eps shortcut: Pr[y=+1] upper-bounds the optimal positive bias,
    // so a tiny estimate means a constant hypothesis suffices.
    const std::size_t n1 =
        static_cast<std::size_t>(std::ceil(32.0 * std::log(2.0 / cfg.delta) / (eps * eps)));
    const double p_plus = 1.0 - negative_rate(oracle, n1, cursor);
    if (p_plus <= 0.5 * eps) {
        out.stage = "bias-shortcut";
        const Hypothesis const_plus = Hypothesis::constant(+1);
        const CheckResult c = check_false_positive(const_plus, oracle, 0.75 * eps, cfg.delta, &cursor);
        out.hypothesis = c.pass ? const_plus : Hypothesis::constant(-1);
        return out;
    }

    // (2) Easy case: the convex program handles negatively biased targets.
    // A degenerate const_minus only means the program found no direction, so
    // the walk still gets its chance; genuine outputs are checked and kept.
    const Hypothesis easy =
        easycase_learn(oracle, 0.5 * eps, derive_seed(seed, stream::kEasycase), cfg, &cursor);
    if (easy.kind != Hypothesis::Kind::const_minus) {
        const CheckResult c = check_false_positive(easy, oracle, eps, cfg.delta, &cursor);
        if (c.pass) {
            out.hypothesis = easy;
            out.stage = "easycase";
            return out;
        }
    }

    // (3) Bias descent: walk at eps/2 for each guess; exhausted walks just
    // move to the next guess.
    LearnerConfig walk_cfg = cfg;
    walk_cfg.restart_budget = cfg.walk_restarts_per_alpha;
    for (int k = 1;; ++k) {
        const double alpha = 0.5 - static_cast<double>(k) * step;
        if (alpha < kAlphaFloor) break;
        ++out.alphas_tried;
        const WalkResult wr = random_walk_learn(oracle, 0.5 * eps, alpha, walk_cfg,
                                                derive_seed(seed, stream::kLearnTop, static_cast<std::uint64_t>(k)),
                                                &cursor);
        out.walk_restarts += wr.restarts_used;
        if (wr.exhausted) continue;
        const CheckResult c = check_false_positive(wr.hypothesis, oracle, eps, cfg.delta, &cursor);
        if (c.pass) {
            out.hypothesis = wr.hypothesis;
            out.stage = "walk";
            out.alpha_used = alpha;
            out.trace = wr.trace;
            return out;
        }
    }

    // (4) Nothing passed; the -1 constant is always reliable on the
    // false-positive clause.
    out.hypothesis = Hypothesis::constant(-1);
    out.stage = "exhausted";
    out.walk_exhausted = true;
    return out;
}

}  // namespace rhl
