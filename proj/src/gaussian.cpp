#include "rhl/gaussian.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace rhl {

namespace {

constexpr double kInvSqrtPi = 0.5641895835477562869;   // 1/sqrt(pi)
constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2*pi)

// Maclaurin series for erf, used on |x| <= 1 where it converges fast and the
// sum has no damaging cancellation.
double erf_series(double x) {
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int n = 1; n < 80; ++n) {
        term *= -x2 / n;
        const double add = term / (2 * n + 1);
        sum += add;
        if (std::abs(add) <= 1e-18 * std::abs(sum)) break;
    }
    return 2.0 * kInvSqrtPi * sum;
}

// Continued fraction for sqrt(pi) * exp(x^2) * erfc(x), x > 1, evaluated with
// the modified Lentz scheme: 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
double erfc_fraction(double x) {
    const double tiny = 1e-300;
    double f = tiny;
    double c = tiny;
    double d = 0.0;
    for (int n = 1; n <= 20000; ++n) {
        const double a = (n == 1) ? 1.0 : 0.5 * (n - 1);
        d = x + a * d;
        if (d == 0.0) d = tiny;
        c = x + a / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    return f;
}

}  // namespace

double erf_own(double x) {
    if (x < 0.0) return -erf_own(-x);
    if (x <= 1.0) return erf_series(x);
    return 1.0 - erfc_own(x);
}

double erfc_own(double x) {
    if (x < 0.0) return 2.0 - erfc_own(-x);
    if (x <= 1.0) return 1.0 - erf_series(x);
    return std::exp(-x * x) * kInvSqrtPi * erfc_fraction(x);
}

double gaussian_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double gaussian_cdf(double x) { return 0.5 * erfc_own(-x / std::numbers::sqrt2); }

double gaussian_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw argument_error("gaussian_quantile requires p in (0, 1), got " + fmt_g9(p));
    }
    double lo = -40.0, hi = 40.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (gaussian_cdf(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        const double density = gaussian_pdf(x);
        if (density <= 0.0) break;
        x -= (gaussian_cdf(x) - p) / density;
    }
    return x;
}

void hermite_values(int k, double t, double* out) {
    if (k < 0 || k > kHermiteMaxDegree) {
        throw argument_error("hermite degree must be in [0, 64], got " + std::to_string(k));
    }
    out[0] = 1.0;
    if (k == 0) return;
    out[1] = t;
    for (int j = 1; j < k; ++j) {
        out[j + 1] = (t * out[j] - std::sqrt(double(j)) * out[j - 1]) / std::sqrt(double(j + 1));
    }
}

double hermite_univariate(int k, double t) {
    double buf[kHermiteMaxDegree + 1];
    hermite_values(k, t, buf);
    return buf[k];
}

double log_odd_double_factorial(std::int64_t m) {
    if (m < -1 || m % 2 == 0) {
        throw argument_error("double factorial helper needs odd m >= -1, got " + std::to_string(m));
    }
    if (m <= 1) return 0.0;
    // m = 2k-1: (2k-1)!! = (2k)! / (2^k k!)
    const double k = 0.5 * double(m + 1);
    return std::lgamma(2.0 * k + 1.0) - k * std::numbers::ln2 - std::lgamma(k + 1.0);
}

double odd_double_factorial(std::int64_t m) { return std::exp(log_odd_double_factorial(m)); }

int sign_matching_degree(double b) {
    const double mag = std::abs(b);
    const double hi = 4.0 * std::max(mag, 1.0);
    std::int64_t k = static_cast<std::int64_t>(std::ceil(4.0 * mag * mag));
    if (k < 1) k = 1;
    if (k % 2 == 0) ++k;
    if (std::sqrt(double(k)) > hi) {
        throw argument_error("no odd degree satisfies the sign matching window for b = " + fmt_g9(b));
    }
    return static_cast<int>(k);
}

UnivariatePoly sign_matching_poly(double b) {
    if (std::abs(b) < 4.0) {
        throw argument_error("sign matching polynomial needs |b| >= 4, got " + fmt_g9(b));
    }
    const double mag = std::abs(b);
    const int k = sign_matching_degree(mag);
    const double ln_b = std::log(mag);

    // All magnitudes in log space: the raw construction z^{3k} - C(z^{2k} - M)
    // with M = (2k-1)!! and C = b^{3k} / (b^{2k} - M) involves factors far
    // beyond the double grid even when the normalized coefficients fit.
    const double ln_m = log_odd_double_factorial(2LL * k - 1);
    const double ln_b2k = 2.0 * k * ln_b;
    // In the admissible window sqrt(k) >= 2|b| the moment M dominates b^{2k},
    // so the denominator b^{2k} - M is negative.
    if (ln_m <= ln_b2k) {
        throw numeric_error("sign matching invariant failed: (2k-1)!! should dominate b^{2k}");
    }
    const double ln_denom = ln_m + std::log1p(-std::exp(ln_b2k - ln_m));
    const double ln_abs_c = 3.0 * k * ln_b - ln_denom;  // C itself is negative

    // Second moment of the raw polynomial: (6k-1)!! + C^2 ((4k-1)!! - M^2).
    const double ln_t1 = log_odd_double_factorial(6LL * k - 1);
    const double ln_m4 = log_odd_double_factorial(4LL * k - 1);
    if (ln_m4 <= 2.0 * ln_m) {
        throw numeric_error("sign matching invariant failed: (4k-1)!! should dominate M^2");
    }
    const double ln_t2 = 2.0 * ln_abs_c + ln_m4 + std::log1p(-std::exp(2.0 * ln_m - ln_m4));
    const double ln_hi = std::max(ln_t1, ln_t2);
    const double ln_var = ln_hi + std::log1p(std::exp(std::min(ln_t1, ln_t2) - ln_hi));
    const double ln_scale = 0.5 * ln_var;

    const double lead = std::exp(-ln_scale);
    const double mid = std::exp(ln_abs_c - ln_scale);
    const double tail = std::exp(ln_abs_c + ln_m - ln_scale);
    if (lead < std::numeric_limits<double>::min() || mid < std::numeric_limits<double>::min() ||
        tail < std::numeric_limits<double>::min() || !std::isfinite(tail)) {
        throw resource_error("sign matching coefficients leave the double range at b = " + fmt_g9(b));
    }

    UnivariatePoly p;
    p.coeffs.assign(3 * std::size_t(k) + 1, 0.0);
    // p(z) = (z^{3k} + |C| z^{2k} - |C| M) / scale, matching sign(z - |b|).
    p.coeffs[3 * std::size_t(k)] = lead;
    p.coeffs[2 * std::size_t(k)] = mid;
    p.coeffs[0] = -tail;

    if (b < 0.0) {
        // Reflect: q(z) = -p(-z) matches sign(z - b) for negative b.
        for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
            p.coeffs[i] = (i % 2 == 0) ? -p.coeffs[i] : p.coeffs[i];
        }
    }
    return p;
}

QuadratureRule gauss_hermite_rule(int n) {
    if (n < 1) throw argument_error("quadrature rule needs at least one node");
    if (n > 2000) throw argument_error("quadrature rule capped at 2000 nodes");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double off = std::sqrt(double(i));
        jacobi(i, i - 1) = off;
        jacobi(i - 1, i) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw numeric_error("quadrature eigensolve failed for n = " + std::to_string(n));
    }
    // Eigenvalues locate the nodes to absolute precision, which is enough for
    // the abscissas but not for the far-tail weights: eigenvector first
    // components there drown in absolute rounding error. Polish each node on
    // the orthonormal recurrence and take weights from the Christoffel
    // function 1 / sum_j h_j(x)^2, which is relatively accurate.
    std::vector<double> h(std::size_t(n) + 1);
    const auto eval_all = [&](double t) {
        h[0] = 1.0;
        if (n >= 1) h[1] = t;
        for (int j = 1; j < n; ++j) {
            h[j + 1] = (t * h[j] - std::sqrt(double(j)) * h[j - 1]) / std::sqrt(double(j + 1));
        }
    };
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = solver.eigenvalues()(i);
        for (int it = 0; it < 3; ++it) {
            eval_all(x);
            const double deriv = std::sqrt(double(n)) * h[n - 1];
            if (deriv == 0.0) break;
            x -= h[n] / deriv;
        }
        eval_all(x);
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += h[j] * h[j];
        rule.nodes[i] = x;
        rule.weights[i] = 1.0 / s;
    }
    return rule;
}

const QuadratureRule& default_quadrature() {
    static const QuadratureRule rule = gauss_hermite_rule(kDefaultQuadratureNodes);
    return rule;
}

QuadratureRule gauss_legendre_rule(int n) {
    if (n < 1) throw argument_error("quadrature rule needs at least one node");
    if (n > 2000) throw argument_error("quadrature rule capped at 2000 nodes");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double off = double(i) / std::sqrt(4.0 * i * i - 1.0);
        jacobi(i, i - 1) = off;
        jacobi(i - 1, i) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    if (solver.info() != Eigen::Success) {
        throw numeric_error("quadrature eigensolve failed for n = " + std::to_string(n));
    }
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[i] = 2.0 * v0 * v0;
    }
    return rule;
}

const QuadratureRule& segment_rule() {
    static const QuadratureRule rule = gauss_legendre_rule(20);
    return rule;
}

double hermite_tail_integral(int k, double c) {
    if (k < 0 || k > kHermiteMaxDegree) throw argument_error("tail integral degree out of range");
    if (k == 0) return 1.0 - gaussian_cdf(c);
    // He_{k-1}(c) = h_{k-1}(c) sqrt((k-1)!), and the normalization divides by
    // sqrt(k!), leaving h_{k-1}(c) / sqrt(k).
    return hermite_univariate(k - 1, c) * gaussian_pdf(c) / std::sqrt(double(k));
}

double dot(const double* a, const double* b, int d) {
    double acc = 0.0;
    for (int i = 0; i < d; ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(const double* a, int d) { return std::sqrt(dot(a, a, d)); }

void normalize(std::vector<double>& v) {
    const double n = norm2(v.data(), static_cast<int>(v.size()));
    if (n < 1e-300) throw numeric_error("cannot normalize a zero vector");
    for (double& x : v) x /= n;
}

std::vector<double> complement_basis(const std::vector<double>& w) {
    const int d = static_cast<int>(w.size());
    if (d < 2) throw argument_error("complement basis needs dimension >= 2");
    const double n = norm2(w.data(), d);
    if (std::abs(n - 1.0) > 1e-8) {
        throw argument_error("complement basis needs a unit vector, norm = " + fmt_g9(n));
    }
    // Householder reflector sending w to -sign(w_0) e_1; its columns 2..d are
    // an orthonormal basis of the complement of w.
    std::vector<double> v = w;
    const double s = (w[0] >= 0.0) ? 1.0 : -1.0;
    v[0] += s;
    const double vnorm2 = dot(v.data(), v.data(), d);
    std::vector<double> basis(std::size_t(d) * (d - 1), 0.0);
    for (int j = 1; j < d; ++j) {
        double* col = basis.data() + std::size_t(j - 1) * d;
        const double factor = 2.0 * v[j] / vnorm2;
        for (int i = 0; i < d; ++i) col[i] = -factor * v[i];
        col[j] += 1.0;
    }
    return basis;
}

std::vector<double> project_offcomplement(const std::vector<double>& x,
                                          const std::vector<double>& w,
                                          const std::vector<double>& basis) {
    const int d = static_cast<int>(w.size());
    if (static_cast<int>(x.size()) != d || basis.size() != std::size_t(d) * (d - 1)) {
        throw argument_error("projection size mismatch");
    }
    const double tol = 1e-10;
    if (std::abs(dot(w.data(), w.data(), d) - 1.0) > tol) {
        throw argument_error("projection frame is not orthonormal");
    }
    for (int i = 0; i < d - 1; ++i) {
        const double* bi = basis.data() + std::size_t(i) * d;
        if (std::abs(dot(bi, w.data(), d)) > tol) {
            throw argument_error("projection frame is not orthonormal");
        }
        for (int j = i; j < d - 1; ++j) {
            const double* bj = basis.data() + std::size_t(j) * d;
            const double expect = (i == j) ? 1.0 : 0.0;
            if (std::abs(dot(bi, bj, d) - expect) > tol) {
                throw argument_error("projection frame is not orthonormal");
            }
        }
    }
    std::vector<double> out(d - 1);
    for (int i = 0; i < d - 1; ++i) {
        out[i] = dot(basis.data() + std::size_t(i) * d, x.data(), d);
    }
    return out;
}

std::vector<double> random_unit_in_span(const std::vector<double>& basis, int d, int m, Rng& rng) {
    if (m < 1) throw argument_error("random direction needs a nonempty span");
    if (basis.size() != std::size_t(d) * m) throw argument_error("span size mismatch");
    std::vector<double> out(d);
    for (int attempt = 0; attempt < 16; ++attempt) {
        std::fill(out.begin(), out.end(), 0.0);
        for (int j = 0; j < m; ++j) {
            const double g = rng.normal();
            const double* col = basis.data() + std::size_t(j) * d;
            for (int i = 0; i < d; ++i) out[i] += g * col[i];
        }
        const double n = norm2(out.data(), d);
        if (n > 1e-12) {
            for (double& x : out) x /= n;
            return out;
        }
    }
    throw numeric_error("failed to draw a unit vector in the span");
}

}  // namespace rhl
