#pragma once

#include <cstdint>
#include <vector>

#include "rhl/common.hpp"
#include "rhl/rng.hpp"

namespace rhl {

// ---------------------------------------------------------------------------
// Standard normal analytics. Implemented in-repo (series plus continued
// fraction) so results are bit-stable across platforms and libm versions.
// ---------------------------------------------------------------------------

double erf_own(double x);
double erfc_own(double x);

double gaussian_pdf(double x);
double gaussian_cdf(double x);

// Inverse CDF. Requires p in (0, 1); bisection bracket followed by Newton
// polish, accurate to |Phi(result) - p| <= 1e-12.
double gaussian_quantile(double p);

// ---------------------------------------------------------------------------
// Normalized probabilists' Hermite polynomials h_k = He_k / sqrt(k!), an
// orthonormal family under the unit Gaussian. k <= 64.
// ---------------------------------------------------------------------------

constexpr int kHermiteMaxDegree = 64;

// Fills out[0..k] with h_0(t) .. h_k(t) via the stable three-term recurrence.
void hermite_values(int k, double t, double* out);

double hermite_univariate(int k, double t);

// log((m)!!) for odd m >= 1, via lgamma. m = 2k-1 gives the Gaussian moment
// E[z^{2k}].
double log_odd_double_factorial(std::int64_t m);
double odd_double_factorial(std::int64_t m);

// ---------------------------------------------------------------------------
// Dense univariate polynomial in the monomial basis.
// ---------------------------------------------------------------------------

struct UnivariatePoly {
    std::vector<double> coeffs;  // coeffs[i] multiplies z^i; trailing entry nonzero

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }

    double eval(double z) const {
        double acc = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * z + coeffs[i];
        return acc;
    }
};

// Degree used by the sign-matching construction at threshold magnitude |b|:
// the smallest odd k with 2|b| <= sqrt(k) <= 4 max(|b|, 1).
int sign_matching_degree(double b);

// Unit-variance, mean-zero polynomial whose sign on the real line matches
// sign(z - b). Requires |b| >= 4; negative b is handled by reflecting the
// construction for |b|. Coefficients are assembled in log space; magnitudes
// of b much beyond 4.6 underflow the double grid and raise a resource error.
UnivariatePoly sign_matching_poly(double b);

// ---------------------------------------------------------------------------
// Gauss-Hermite quadrature for the unit Gaussian weight.
// ---------------------------------------------------------------------------

struct QuadratureRule {
    std::vector<double> nodes;    // strictly increasing
    std::vector<double> weights;  // positive, sums to 1

    std::size_t size() const { return nodes.size(); }

    template <typename F>
    double integrate(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

constexpr int kDefaultQuadratureNodes = 201;

// n-node rule, exact for polynomials up to degree 2n-1 against the unit
// Gaussian. Nodes and weights come from the symmetric tridiagonal recurrence
// matrix (off-diagonals sqrt(i)).
QuadratureRule gauss_hermite_rule(int n);

const QuadratureRule& default_quadrature();

// n-node Gauss-Legendre rule on [-1, 1] (weights sum to 2), for smooth
// segment integrals.
QuadratureRule gauss_legendre_rule(int n);

// Shared 20-node Legendre rule used for short Gaussian-weighted segments.
const QuadratureRule& segment_rule();

// integral of f(z) phi(z) over [a, b] with the fixed 20-node Legendre rule.
template <typename F>
double integrate_gaussian_segment(double a, double b, F&& f) {
    const QuadratureRule& rule = segment_rule();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double zq = mid + half * rule.nodes[i];
        acc += rule.weights[i] * f(zq) * gaussian_pdf(zq);
    }
    return acc * half;
}

// integral of h_k(z) phi(z) over [c, inf): He_{k-1}(c) phi(c) / sqrt(k!) for
// k >= 1 and the tail mass for k = 0.
double hermite_tail_integral(int k, double c);

// ---------------------------------------------------------------------------
// Subspace helpers.
// ---------------------------------------------------------------------------

// Deterministic orthonormal basis of the complement of unit vector w,
// returned as d*(d-1) column-major matrix (columns are basis vectors).
// Built from the Householder reflector that maps e1 to w.
std::vector<double> complement_basis(const std::vector<double>& w);

// Coordinates of x in the given orthonormal complement basis of w. Checks
// that [w, basis] is orthonormal to 1e-10 and throws argument_error if not.
std::vector<double> project_offcomplement(const std::vector<double>& x,
                                          const std::vector<double>& w,
                                          const std::vector<double>& basis);

// Gaussian-weighted random unit vector in the span of the given orthonormal
// columns (d x m, column-major). Throws argument_error if m == 0.
std::vector<double> random_unit_in_span(const std::vector<double>& basis, int d, int m, Rng& rng);

// Small dense helpers shared across modules.
double dot(const double* a, const double* b, int d);
double norm2(const double* a, int d);
void normalize(std::vector<double>& v);

}  // namespace rhl
