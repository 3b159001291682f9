#include "chainkit/cover.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "chainkit/rng.hpp"

namespace chainkit {

namespace {

int smallest_n0(int N) {
    int n0 = 1;
    while ((1LL << n0) < N) ++n0;
    return n0;  // 2^{n0} >= N >= 2^{n0-1}
}

double display_value(double m, int N) { return m * std::log(std::exp(1.0) * N / m); }

constexpr long long kExplicitCubeCap = 1 << 20;

long long checked_pow(long long base, int exp, long long cap) {
    long long v = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && v > cap / base) return cap + 1;
        v *= base;
    }
    return v;
}

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long v = 1;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}

std::vector<std::uint32_t> supports_of_size(int N, int m) {
    std::vector<std::uint32_t> out;
    std::uint32_t mask = (std::uint32_t(1) << m) - 1u;
    for (;;) {
        out.push_back(mask);
        if (m == N) break;
        const std::uint32_t c = mask & (~mask + 1u);
        const std::uint32_t r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
        if (mask >= (std::uint32_t(1) << N)) break;
    }
    return out;
}

double cell_min_norm2(const std::vector<double>& lo, const std::vector<double>& hi) {
    double s = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        double d = 0.0;
        if (lo[i] > 0.0) d = lo[i];
        else if (hi[i] < 0.0) d = -hi[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// grid cells of side `t` tiling [-1, -1 + cells*t]^N that intersect the ball
void enumerate_ball_cells(int N, double t, long long cells_per_axis, std::vector<Cube>& out) {
    std::vector<long long> idx(static_cast<std::size_t>(N), 0);
    std::vector<double> lo(static_cast<std::size_t>(N)), hi(static_cast<std::size_t>(N));
    for (;;) {
        for (int i = 0; i < N; ++i) {
            lo[static_cast<std::size_t>(i)] = -1.0 + t * static_cast<double>(idx[i]);
            hi[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)] + t;
        }
        if (cell_min_norm2(lo, hi) <= 1.0) {
            Cube c;
            c.linf_radius = 0.5 * t;
            for (int i = 0; i < N; ++i) c.center.push_back(lo[static_cast<std::size_t>(i)] + 0.5 * t);
            out.push_back(std::move(c));
        }
        int j = 0;
        while (j < N) {
            if (++idx[static_cast<std::size_t>(j)] < cells_per_axis) break;
            idx[static_cast<std::size_t>(j)] = 0;
            ++j;
        }
        if (j == N) break;
    }
}

// cubes over a support J: J-coordinates from the axis grid, complement [-t, t]
void enumerate_support_cubes(int N, std::uint32_t support, double side,
                             long long cells_per_axis, std::vector<Cube>& out) {
    std::vector<int> coords;
    for (int i = 0; i < N; ++i) {
        if (support >> i & 1u) coords.push_back(i);
    }
    std::vector<long long> idx(coords.size(), 0);
    for (;;) {
        Cube c;
        c.center.assign(static_cast<std::size_t>(N), 0.0);
        c.linf_radius = 0.5 * side;
        for (std::size_t k = 0; k < coords.size(); ++k) {
            c.center[static_cast<std::size_t>(coords[k])] =
                -1.0 + side * static_cast<double>(idx[k]) + 0.5 * side;
        }
        out.push_back(std::move(c));
        std::size_t j = 0;
        while (j < coords.size()) {
            if (++idx[j] < cells_per_axis) break;
            idx[j] = 0;
            ++j;
        }
        if (j == coords.size()) break;
    }
}

}  // namespace

double log2_ball_volume(int N) {
    const double half = 0.5 * static_cast<double>(N);
    return (half * std::log(M_PI) - std::lgamma(half + 1.0)) / std::log(2.0);
}

MSequence m_sequence(int N, int sigma) {
    require(N >= 2, "N must be at least 2");
    require(sigma >= 1, "sigma must be at least 1");
    MSequence out;
    out.N = N;
    out.sigma = sigma;
    out.n0 = smallest_n0(N);
    const int lo = (out.n0 + 1) / 2 + sigma;
    const int hi = out.n0 + sigma;
    for (int n = lo; n <= hi; ++n) {
        const double need = std::exp2(static_cast<double>(n - sigma));
        long long m = -1;
        for (long long cand = 1; cand <= N; ++cand) {
            if (display_value(static_cast<double>(cand), N) >= need) { m = cand; break; }
        }
        if (m < 0) {
            // the display tops out at m = N with value N; 2^{n0} >= N can exceed
            // it at the last index, which the paper pins to m = 2^{n0} >= N
            if (n == hi) {
                m = N;
                out.last_capped = true;
            } else {
                throw UsageError("no m in [1,N] satisfies the display at N=" + std::to_string(N) +
                                 " sigma=" + std::to_string(sigma) + " n=" + std::to_string(n));
            }
        }
        out.n.push_back(n);
        out.m.push_back(m);
    }
    for (std::size_t i = 0; i < out.n.size(); ++i) {
        const int n = out.n[i];
        const double mval = static_cast<double>(out.m[i]);
        const bool capped = out.last_capped && i + 1 == out.n.size();
        if (!capped && display_value(mval, N) > std::exp2(static_cast<double>(n - sigma + 1))) {
            throw UsageError("m_n log(eN/m_n) exceeds 2^{n-sigma+1} at N=" + std::to_string(N) +
                             " sigma=" + std::to_string(sigma) + " n=" + std::to_string(n));
        }
        const double floor_m = N * std::pow(0.125, static_cast<double>(out.n0 + sigma - n));
        if (mval < floor_m - 1e-9) {
            throw UsageError("m_n falls below N (1/8)^{n0+sigma-n} at N=" + std::to_string(N) +
                             " sigma=" + std::to_string(sigma) + " n=" + std::to_string(n));
        }
        if (i > 0 && out.m[i] > 8 * out.m[i - 1]) {
            throw UsageError("m_{n+1} > 8 m_n in the middle regime at N=" + std::to_string(N));
        }
    }
    return out;
}

CubeAssignment CubeCover::locate(const std::vector<double>& x) const {
    CubeAssignment out;
    if (x.size() != static_cast<std::size_t>(N) || cells_per_axis <= 0) return out;
    auto axis_cell = [&](double xi) {
        auto j = static_cast<long long>(std::floor((xi + 1.0) / side));
        return std::clamp<long long>(j, 0, cells_per_axis - 1);
    };
    auto center_of = [&](long long j) { return -1.0 + side * static_cast<double>(j) + 0.5 * side; };
    switch (regime) {
        case CubeRegime::Low: {
            out.covered = true;
            out.cube_id = 0;
            for (double xi : x) out.linf_residual = std::max(out.linf_residual, std::abs(xi));
            return out;
        }
        case CubeRegime::High: {
            std::uint64_t id = 0xA5A5A5A5ull;
            double res = 0.0;
            for (int i = 0; i < N; ++i) {
                const long long j = axis_cell(x[static_cast<std::size_t>(i)]);
                id = mix64(id + static_cast<std::uint64_t>(j));
                res = std::max(res, std::abs(x[static_cast<std::size_t>(i)] - center_of(j)));
            }
            out.covered = res <= 0.5 * side + 1e-12;
            out.cube_id = static_cast<long long>(id >> 1);
            out.linf_residual = res;
            return out;
        }
        case CubeRegime::Middle: {
            const double t = 0.5 * side;
            // a ball point exceeds the threshold on fewer than 1/t^2 = m_n coords
            std::uint32_t support = 0;
            int n_big = 0;
            for (int i = 0; i < N; ++i) {
                if (std::abs(x[static_cast<std::size_t>(i)]) > t) {
                    support |= (1u << i);
                    ++n_big;
                }
            }
            if (n_big > m_n) return out;  // miss
            for (int i = 0; i < N && std::popcount(support) < m_n; ++i) support |= (1u << i);
            std::uint64_t id = support;
            double res = 0.0;
            for (int i = 0; i < N; ++i) {
                if (support >> i & 1u) {
                    const long long j = axis_cell(x[static_cast<std::size_t>(i)]);
                    id = mix64(id + static_cast<std::uint64_t>(j));
                    res = std::max(res, std::abs(x[static_cast<std::size_t>(i)] - center_of(j)));
                } else {
                    res = std::max(res, std::abs(x[static_cast<std::size_t>(i)]));
                }
            }
            out.covered = res <= t + 1e-12;
            out.cube_id = static_cast<long long>(id >> 1);
            out.linf_residual = res;
            return out;
        }
    }
    return out;
}

CubeCover ball_cube_cover(int N, int n, int sigma) {
    require(N >= 2 && N <= (1 << 20), "N out of range");
    require(n >= 0, "level must be nonnegative");
    require(sigma >= 1, "sigma must be at least 1");
    CubeCover cover;
    cover.N = N;
    cover.n = n;
    cover.sigma = sigma;
    cover.log2_certified_bound = std::exp2(static_cast<double>(n + sigma));

    const int n0 = smallest_n0(N);
    const int mid_lo = (n0 + 1) / 2 + sigma;
    const int mid_hi = n0 + sigma;

    if (n < mid_lo) {
        cover.regime = CubeRegime::Low;
        cover.side = 2.0;
        cover.cells_per_axis = 1;
        cover.explicit_mode = true;
        Cube c;
        c.center.assign(static_cast<std::size_t>(N), 0.0);
        c.linf_radius = 1.0;
        cover.cubes.push_back(std::move(c));
        cover.log2_count = 0.0;
        cover.l2_diameter = 2.0;
        return cover;
    }

    if (n <= mid_hi) {
        cover.regime = CubeRegime::Middle;
        const MSequence seq = m_sequence(N, sigma);
        cover.m_n = seq.m[static_cast<std::size_t>(n - mid_lo)];
        const double t = 1.0 / std::sqrt(static_cast<double>(cover.m_n));
        cover.side = 2.0 * t;
        cover.cells_per_axis = static_cast<long long>(std::ceil(1.0 / t - 1e-12));
        cover.l2_diameter = 2.0;  // not controlled beyond the ball's own diameter
        const long long n_supports = binomial(N, static_cast<int>(cover.m_n));
        cover.log2_count = std::log2(static_cast<double>(n_supports)) +
                           static_cast<double>(cover.m_n) *
                               std::log2(static_cast<double>(cover.cells_per_axis));
        if (cover.log2_count > cover.log2_certified_bound) {
            throw UsageError("middle-regime count certificate failed at N=" + std::to_string(N) +
                             " n=" + std::to_string(n) + "; increase sigma");
        }
        const long long per_support =
            checked_pow(cover.cells_per_axis, static_cast<int>(cover.m_n), kExplicitCubeCap);
        if (N <= 10 && per_support <= kExplicitCubeCap / std::max(1LL, n_supports)) {
            cover.explicit_mode = true;
            for (std::uint32_t support : supports_of_size(N, static_cast<int>(cover.m_n))) {
                enumerate_support_cubes(N, support, cover.side, cover.cells_per_axis, cover.cubes);
            }
            cover.log2_count = std::log2(static_cast<double>(cover.cubes.size()));
        }
        return cover;
    }

    cover.regime = CubeRegime::High;
    // side N^{-1/2} N_n^{-1/N}, certificate via exact ball volume:
    // count <= omega_N (1 + t sqrt(N))^N / t^N <= N_{n+sigma}
    const double log2_side = -0.5 * std::log2(static_cast<double>(N)) -
                             std::exp2(static_cast<double>(n)) / static_cast<double>(N);
    const double log2_vol_bound =
        log2_ball_volume(N) +
        N * std::log2(1.0 + std::exp2(log2_side) * std::sqrt(static_cast<double>(N))) -
        static_cast<double>(N) * log2_side;
    cover.log2_count = log2_vol_bound;
    if (log2_vol_bound > cover.log2_certified_bound) {
        throw UsageError("high-regime count certificate failed at N=" + std::to_string(N) +
                         " n=" + std::to_string(n) + "; increase sigma");
    }
    cover.side = std::exp2(log2_side);
    cover.l2_diameter = std::min(2.0, cover.side * std::sqrt(static_cast<double>(N)));
    if (log2_side > -50.0) {
        cover.cells_per_axis = static_cast<long long>(std::ceil(2.0 / cover.side - 1e-12));
        const long long grid_count = checked_pow(cover.cells_per_axis, N, kExplicitCubeCap);
        if (N <= 10 && grid_count <= kExplicitCubeCap) {
            cover.explicit_mode = true;
            enumerate_ball_cells(N, cover.side, cover.cells_per_axis, cover.cubes);
            cover.log2_count = std::log2(static_cast<double>(cover.cubes.size()));
            if (cover.log2_count > cover.log2_certified_bound) {
                throw InternalError("explicit high-regime count exceeded its certificate");
            }
        }
    }
    return cover;
}

CoverAudit audit_cover(const CubeCover& cover, int n_points, std::uint64_t seed) {
    require(cover.cells_per_axis > 0,
            "cover too deep for grid location; audit a shallower level");
    CoverAudit audit;
    audit.points = n_points;
    std::vector<double> x(static_cast<std::size_t>(cover.N));
    for (int p = 0; p < n_points; ++p) {
        CounterRng rng(seed, static_cast<std::uint64_t>(p));
        for (;;) {
            double norm2 = 0.0;
            for (auto& xi : x) {
                xi = 2.0 * rng.next_uniform() - 1.0;
                norm2 += xi * xi;
            }
            if (norm2 <= 1.0) break;
        }
        const CubeAssignment a = cover.locate(x);
        if (!a.covered) ++audit.misses;
        else audit.max_residual = std::max(audit.max_residual, a.linf_residual);
    }
    return audit;
}

int calibrate_sigma(int N, int sigma_cap) {
    for (int sigma = 1; sigma <= sigma_cap; ++sigma) {
        try {
            const MSequence seq = m_sequence(N, sigma);
            (void)ball_cube_cover(N, 0, sigma);
            for (int n : seq.n) (void)ball_cube_cover(N, n, sigma);
            // the high-regime margin 2^{n+sigma} - log2 count grows with n, so
            // the first levels past the middle band are the binding ones
            for (int n = seq.n0 + sigma + 1; n <= seq.n0 + sigma + 3; ++n) {
                (void)ball_cube_cover(N, n, sigma);
            }
            return sigma;
        } catch (const UsageError&) {
            continue;
        }
    }
    throw UsageError("no sigma up to " + std::to_string(sigma_cap) +
                     " certifies N=" + std::to_string(N));
}

EllipsoidBound ellipsoid_entropy_bound(const IndexedVector& x, const IndexedVector& t) {
    require_structure(x.dim() == t.dim(), "vector dimension mismatch");
    EllipsoidBound out;
    const std::size_t d = x.dim();
    std::vector<double> prod(d);
    for (std::size_t i = 0; i < d; ++i) prod[i] = x.abs_coord(i) * t.abs_coord(i);
    std::sort(prod.begin(), prod.end(), std::greater<double>());
    for (std::size_t n = 0; (std::size_t(1) << n) <= d; ++n) {
        // the paper's x_{2^n} is 1-indexed on the non-increasing rearrangement
        out.sum += std::exp2(0.5 * static_cast<double>(n)) * prod[(std::size_t(1) << n) - 1];
    }
    out.schwartz_cap = 2.0 * x.norm2() * t.norm2();
    return out;
}

}  // namespace chainkit
