#pragma once

#include <span>
#include <vector>

#include "chainkit/core.hpp"
#include "chainkit/metrics.hpp"

// Test-only oracles, kept independent of the implementation paths they check:
// the quantile solver is verified against adaptive quadrature of the tail
// integral, covers against subset enumeration, shattering against direct
// assignment enumeration.

namespace chainkit::oracles {

// F_{q,n} via the tail-integral form int_1^inf P(|Z| sigma > q t) dt,
// adaptive Simpson quadrature, then bisection against 1/N_n.
double quantile_by_quadrature(double sigma, int n);

// E(|Z| - a)_+ by adaptive Simpson on the density form.
double half_normal_excess_by_quadrature(double a);

// minimal ball cover by enumerating center subsets in increasing size
int covering_number_bruteforce(const DistanceMatrix& dist, double eps);

// eps-shattering feasibility of coordinate subset J by enumerating the
// labeling -> witness assignments directly
bool shattered_bruteforce(const PointSet& U, std::span<const int> J, double eps);
int shattering_dimension_bruteforce(const PointSet& U, double eps, int cap);

// adaptive Simpson on [a, b]
double integrate(double (*f)(double, double), double param, double a, double b, double tol);

}  // namespace chainkit::oracles
