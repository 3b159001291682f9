#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>

namespace chainkit::oracles {

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

double tail_prob(double z) {  // P(|Z| > z)
    return std::erfc(z * 0.7071067811865475244);
}

}  // namespace

double integrate(double (*f)(double, double), double param, double a, double b, double tol) {
    return adaptive_simpson([&](double x) { return f(x, param); }, a, b, tol);
}

double half_normal_excess_by_quadrature(double a) {
    // E(|Z|-a)_+ = 2 phi(a) int_0^inf u exp(-u^2/2 - a u) du after shifting
    // z = a + u; the exponential scale 2 phi(a) factors out analytically so the
    // quadrature runs at O(1) magnitudes even deep in the tail.
    const double hi = std::min(16.0, 6.0 + 46.0 / std::max(a, 0.5));
    const double core = adaptive_simpson(
        [a](double u) { return u * std::exp(-0.5 * u * u - a * u); }, 0.0, hi, 1e-16);
    return 2.0 * 0.3989422804014327 * std::exp(-0.5 * a * a) * core;
}

double quantile_by_quadrature(double sigma, int n) {
    if (sigma == 0.0) return 0.0;
    const double log_target =
        n == 0 ? 0.0 : -std::exp2(static_cast<double>(n)) * 0.6931471805599453;
    // log F(q) with F(q) = int_1^inf P(|Z| > a t) dt, a = q / sigma; the value
    // at t = 1 factors out so the integrand stays O(1)
    auto logF = [&](double q) {
        const double a = q / sigma;
        const double scale = tail_prob(a);
        const double t_max = std::sqrt(1.0 + 100.0 / std::max(a * a, 1e-12)) + 1.0;
        const double core = adaptive_simpson(
            [&](double t) { return tail_prob(a * t) / scale; }, 1.0, t_max, 1e-13);
        return std::log(scale) + std::log(std::max(core, 1e-300));
    };
    double lo = 1e-12 * sigma, hi = sigma * (2.0 + 4.0 * std::exp2(0.5 * n));
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (logF(mid) > log_target) lo = mid; else hi = mid;
        if (hi - lo < 1e-12 * mid) break;
    }
    return 0.5 * (lo + hi);
}

int covering_number_bruteforce(const DistanceMatrix& dist, double eps) {
    const int m = static_cast<int>(dist.size());
    std::vector<std::uint32_t> balls(static_cast<std::size_t>(m), 0);
    for (int c = 0; c < m; ++c) {
        for (int p = 0; p < m; ++p) {
            if (dist.at(c, p) <= eps) balls[static_cast<std::size_t>(c)] |= (1u << p);
        }
    }
    const std::uint32_t full = (1u << m) - 1u;
    for (int k = 1; k <= m; ++k) {
        std::uint32_t subset = (1u << k) - 1u;
        for (;;) {
            std::uint32_t covered = 0;
            for (int c = 0; c < m; ++c) {
                if (subset >> c & 1u) covered |= balls[static_cast<std::size_t>(c)];
            }
            if (covered == full) return k;
            if (k == m) break;
            const std::uint32_t c = subset & (~subset + 1u);
            const std::uint32_t r = subset + c;
            subset = (((r ^ subset) >> 2) / c) | r;
            if (subset > full) break;
        }
    }
    return m;
}

bool shattered_bruteforce(const PointSet& U, std::span<const int> J, double eps) {
    const std::size_t labels = std::size_t(1) << J.size();
    std::vector<std::size_t> pick(labels, 0);
    for (;;) {
        // feasibility of a level function for this assignment: per coordinate
        // the low-side max must clear the high-side min by eps
        bool ok = true;
        for (std::size_t j = 0; j < J.size() && ok; ++j) {
            double low_max = -std::numeric_limits<double>::infinity();
            double high_min = std::numeric_limits<double>::infinity();
            for (std::size_t label = 0; label < labels; ++label) {
                const double ui = U.point(pick[label]).re(static_cast<std::size_t>(J[j]));
                if (label >> j & 1u) low_max = std::max(low_max, ui);
                else high_min = std::min(high_min, ui);
            }
            if (low_max > high_min - eps) ok = false;
        }
        if (ok) return true;
        std::size_t l = 0;
        while (l < labels) {
            if (++pick[l] < U.size()) break;
            pick[l] = 0;
            ++l;
        }
        if (l == labels) return false;
    }
}

int shattering_dimension_bruteforce(const PointSet& U, double eps, int cap) {
    const int d = static_cast<int>(U.dim());
    int dim = 0;
    for (int k = 1; k <= std::min(cap, d); ++k) {
        bool found = false;
        std::vector<int> J(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) J[static_cast<std::size_t>(j)] = j;
        for (;;) {
            if (shattered_bruteforce(U, J, eps)) { found = true; break; }
            int j = k - 1;
            while (j >= 0 && J[static_cast<std::size_t>(j)] == d - k + j) --j;
            if (j < 0) break;
            ++J[static_cast<std::size_t>(j)];
            for (int l = j + 1; l < k; ++l) {
                J[static_cast<std::size_t>(l)] = J[static_cast<std::size_t>(l - 1)] + 1;
            }
        }
        if (!found) break;
        dim = k;
    }
    return dim;
}

}  // namespace chainkit::oracles
