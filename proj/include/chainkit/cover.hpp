#pragma once

#include <vector>

#include "chainkit/core.hpp"

// The three-regime cube covering of B_N(0,1): a single cube for small levels,
// per-support grids with side 2/sqrt(m_n) in the middle band, and a fine grid
// for high levels. Count certificates use exact ball volumes in log2 domain.

namespace chainkit {

struct MSequence {
    int N = 0, sigma = 0, n0 = 0;
    std::vector<int> n;         // middle-regime indices, ceil(n0/2)+sigma .. n0+sigma
    std::vector<long long> m;   // smallest integers with 2^{n-sigma} <= m log(eN/m)
    bool last_capped = false;   // m at the last index forced to N
};

MSequence m_sequence(int N, int sigma);

enum class CubeRegime { Low, Middle, High };

struct Cube {
    std::vector<double> center;
    double linf_radius = 0.0;
};

struct CubeAssignment {
    bool covered = false;
    long long cube_id = -1;
    double linf_residual = 0.0;  // ||x - center||_inf, <= linf_radius when covered
};

class CubeCover {
public:
    CubeRegime regime = CubeRegime::Low;
    int N = 0, n = 0, sigma = 0;
    double side = 0.0;               // linf diameter of each cube
    long long m_n = 0;               // middle regime support size
    long long cells_per_axis = 0;
    bool explicit_mode = false;
    std::vector<Cube> cubes;            // populated in explicit mode
    double log2_count = 0.0;            // exact count (explicit) or volume bound
    double log2_certified_bound = 0.0;  // 2^{n+sigma}
    double l2_diameter = 0.0;           // of cube intersected with the ball, capped at 2

    CubeAssignment locate(const std::vector<double>& x) const;
};

// Cover of B_N(0,1) at level n with certificate count <= N_{n+sigma}.
// Explicit cube lists need N <= 10 and at most 2^20 cubes; beyond that the
// cover is certified by count only and membership works by grid arithmetic.
CubeCover ball_cube_cover(int N, int n, int sigma);

struct CoverAudit {
    int points = 0;
    int misses = 0;
    double max_residual = 0.0;
};

// Rejection-sample quasi-uniform ball points with a fixed seed and check that
// every one lands in a cube of the cover.
CoverAudit audit_cover(const CubeCover& cover, int n_points, std::uint64_t seed);

// Smallest sigma >= 1 whose certificates pass for every middle-regime level
// and the leading high-regime levels of this N.
int calibrate_sigma(int N, int sigma_cap = 8);

struct EllipsoidBound {
    double sum = 0.0;           // sum_{2^n <= d} 2^{n/2} |x t|_{(2^n)}, sorted decreasing
    double schwartz_cap = 0.0;  // 2 ||x||_2 ||t||_2
};

// Remark-1 ellipsoid entropy bound; the sorted-product index 2^n is 1-based.
EllipsoidBound ellipsoid_entropy_bound(const IndexedVector& x, const IndexedVector& t);

double log2_ball_volume(int N);  // log2 of pi^{N/2} / Gamma(N/2 + 1)

}  // namespace chainkit
