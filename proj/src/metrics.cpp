#include "chainkit/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>

namespace chainkit {

void DistanceMatrix::set(std::size_t i, std::size_t j, double v) {
    a_[i * m_ + j] = v;
    a_[j * m_ + i] = v;
}

double DistanceMatrix::max_entry() const {
    double s = 0.0;
    for (double v : a_) s = std::max(s, v);
    return s;
}

double DistanceMatrix::min_positive_entry() const {
    double s = std::numeric_limits<double>::infinity();
    for (double v : a_) {
        if (v > 0.0) s = std::min(s, v);
    }
    return s;
}

double DistanceMatrix::diameter_of(std::span<const int> cell) const {
    double s = 0.0;
    for (std::size_t i = 0; i < cell.size(); ++i) {
        for (std::size_t j = i + 1; j < cell.size(); ++j) {
            s = std::max(s, at(cell[i], cell[j]));
        }
    }
    return s;
}

std::vector<double> DistanceMatrix::sorted_distinct_values() const {
    std::vector<double> vals;
    vals.push_back(0.0);
    for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t j = i + 1; j < m_; ++j) vals.push_back(at(i, j));
    }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

double DistanceMatrix::triangle_defect() const {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < m_; ++u) {
        for (std::size_t v = 0; v < m_; ++v) {
            for (std::size_t w = 0; w < m_; ++w) {
                worst = std::max(worst, at(u, w) - at(u, v) - at(v, w));
            }
        }
    }
    return worst;
}

DistanceMatrix DistanceMatrix::scaled(double c) const {
    DistanceMatrix out(m_);
    for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t j = 0; j < m_; ++j) out.a_[i * m_ + j] = c * a_[i * m_ + j];
    }
    return out;
}

DistanceMatrix DistanceMatrix::entrywise_max(const DistanceMatrix& a, const DistanceMatrix& b) {
    require_structure(a.size() == b.size(), "distance matrix size mismatch");
    DistanceMatrix out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            out.a_[i * a.size() + j] = std::max(a.at(i, j), b.at(i, j));
        }
    }
    return out;
}

DistanceMatrix canonical_distance(const PointSet& T) {
    const std::size_t m = T.size();
    DistanceMatrix d(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            d.set(i, j, (T.point(i) - T.point(j)).norm2());
        }
    }
    return d;
}

DistanceMatrix weighted_distance(const PointSet& T, const IndexedVector& w) {
    require_structure(w.dim() == T.dim(), "weight dimension mismatch");
    const std::size_t m = T.size();
    DistanceMatrix d(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < T.dim(); ++k) {
                const double wk = w.abs_coord(k);
                const double dk = std::abs(T.point(i).coord(k) - T.point(j).coord(k));
                s += wk * wk * dk * dk;
            }
            d.set(i, j, std::sqrt(s));
        }
    }
    return d;
}

DistanceMatrix sup_weighted_distance(const PointSet& T, const PointSet& U) {
    require_structure(U.dim() == T.dim(), "index set dimension mismatch");
    const std::size_t m = T.size();
    DistanceMatrix d(m);
    for (std::size_t u = 0; u < U.size(); ++u) {
        DistanceMatrix du = weighted_distance(T, U.point(u));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                if (du.at(i, j) > d.at(i, j)) d.set(i, j, du.at(i, j));
            }
        }
    }
    return d;
}

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2 pi)
constexpr double kSqrt2OverPi = 0.7978845608028653559; // sqrt(2/pi)

double phi(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double upper_tail(double x) { return 0.5 * std::erfc(x * 0.70710678118654752440); }

// log of h(a) = (1/a) E(|Z| - a)_+, stable for all a > 0. For large a,
// E(|Z|-a)_+ = e^{-a^2/2} sqrt(2/pi) (1/a^2 - 3/a^4 + 15/a^6 - 105/a^8 + ...)
double log_h(double a) {
    if (a < 25.0) {
        const double val = 2.0 * phi(a) - 2.0 * a * upper_tail(a);
        if (val > 0.0) return std::log(val) - std::log(a);
    }
    const double a2 = a * a;
    double series = 1.0 / a2;
    double term = 1.0 / a2;
    double k = 1.0;
    for (int it = 0; it < 6; ++it) {
        term *= -(2.0 * k + 1.0) / a2;
        series += term;
        k += 1.0;
    }
    return -0.5 * a2 + std::log(kSqrt2OverPi * series) - std::log(a);
}

// Solve log_h(a) = -2^n ln2 (or 0 for n = 0) by bisection; monotone decreasing.
double quantile_root(int n) {
    const double log_target = n == 0 ? 0.0
        : -std::exp2(static_cast<double>(n)) * 0.6931471805599453094;
    double lo = 1e-12;
    double hi = 2.0 + 4.0 * std::exp2(0.5 * n);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (log_h(mid) > log_target) lo = mid; else hi = mid;
        if (hi - lo < 1e-12 * mid) break;
    }
    return 0.5 * (lo + hi);
}

constexpr int kQuantileCacheSize = 64;
std::array<double, kQuantileCacheSize> g_quantile_cache{};
std::array<bool, kQuantileCacheSize> g_quantile_cached{};
std::mutex g_quantile_mutex;

double cached_quantile_root(int n) {
    if (n < kQuantileCacheSize) {
        std::lock_guard<std::mutex> lock(g_quantile_mutex);
        if (!g_quantile_cached[n]) {
            g_quantile_cache[n] = quantile_root(n);
            g_quantile_cached[n] = true;
        }
        return g_quantile_cache[n];
    }
    return quantile_root(n);
}

}  // namespace

double gaussian_quantile_distance(double sigma, int n) {
    require(sigma >= 0.0, "sigma must be nonnegative");
    require(n >= 0, "level index must be nonnegative");
    if (sigma == 0.0) return 0.0;
    return sigma * cached_quantile_root(n);
}

double gaussian_quantile_ratio(int n) {
    return cached_quantile_root(n) / std::exp2(0.5 * n);
}

double empirical_quantile_distance(std::span<const double> diff_samples, int n) {
    require(!diff_samples.empty(), "empirical quantile distance needs samples");
    require(n >= 0 && n <= 32, "quantile level capped at 32");
    double maxv = 0.0;
    for (double s : diff_samples) {
        require_structure(std::isfinite(s) && s >= 0.0, "samples must be finite and nonnegative");
        maxv = std::max(maxv, s);
    }
    if (maxv == 0.0) return 0.0;
    const double target = level_cardinality_inverse(n);
    const double inv_m = 1.0 / static_cast<double>(diff_samples.size());
    auto F = [&](double q) {
        double s = 0.0;
        for (double x : diff_samples) {
            if (x > q) s += x / q - 1.0;
        }
        return s * inv_m;
    };
    double lo = 1e-12 * maxv;
    double hi = maxv * (1.0 + 1e-12);  // F(max) = 0 <= target
    for (int it = 0; it < 120; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (F(mid) > target) lo = mid; else hi = mid;
        if (hi - lo < 1e-11 * mid) break;
    }
    return 0.5 * (lo + hi);
}

double moment_distance(std::span<const double> diff_samples, int n) {
    require(!diff_samples.empty(), "moment distance needs samples");
    if (n > 32) {
        throw UsageError("moment distance overflow: level n=" + std::to_string(n) +
                         " exceeds the supported moment order 2^32");
    }
    require(n >= 0, "level index must be nonnegative");
    const double p = std::exp2(static_cast<double>(n));
    double max_log = -std::numeric_limits<double>::infinity();
    for (double s : diff_samples) {
        require_structure(std::isfinite(s) && s >= 0.0, "samples must be finite and nonnegative");
        if (s > 0.0) max_log = std::max(max_log, std::log(s));
    }
    if (!std::isfinite(max_log)) return 0.0;
    // (mean |D|^p)^{1/p} via shifted log-sum-exp
    double acc = 0.0;
    for (double s : diff_samples) {
        if (s > 0.0) acc += std::exp(p * (std::log(s) - max_log));
    }
    const double log_norm = max_log + (std::log(acc) - std::log(static_cast<double>(diff_samples.size()))) / p;
    return 2.0 * std::exp(log_norm);
}

double moment_distance_gaussian(double sigma, int n) {
    require(sigma >= 0.0, "sigma must be nonnegative");
    require(n >= 0 && n <= 32, "moment level capped at 32");
    if (sigma == 0.0) return 0.0;
    const double p = std::exp2(static_cast<double>(n));
    // (E|Z|^p)^{1/p}, E|Z|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi)
    const double log_norm =
        (0.5 * p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(M_PI)) / p;
    return 2.0 * sigma * std::exp(log_norm);
}

double gaussian_minimal_admissible_c(int n_max) {
    require(n_max >= 0, "n_max must be nonnegative");
    double c = 0.0;
    for (int n = 0; n <= n_max; ++n) c = std::max(c, gaussian_quantile_ratio(n));
    return c;
}

double bernoulli_minimal_admissible_c(int n_max) {
    require(n_max >= 0, "n_max must be nonnegative");
    // Hoeffding: P(|D| > y) <= 2 e^{-y^2 / 2 d^2}, so
    // E(|D|/q - 1)_+ <= (2 d^2 / q^2) e^{-q^2 / 2 d^2}; with q = C 2^{n/2} d the
    // admissibility target is (2 / (C^2 2^n)) e^{-C^2 2^n / 2} <= 2^{-2^n}.
    double c = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const double pow2n = std::exp2(static_cast<double>(n));
        auto excess = [&](double C) {
            return std::log(2.0) - std::log(C * C * pow2n) - 0.5 * C * C * pow2n +
                   pow2n * 0.6931471805599453094;
        };
        double lo = 0.25, hi = 4.0;
        for (int it = 0; it < 120; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (excess(mid) > 0.0) lo = mid; else hi = mid;
        }
        c = std::max(c, hi);
    }
    return c;
}

DistanceFamily::DistanceFamily(PointSet base, FamilyKind kind,
                               std::vector<DistanceMatrix> levels, AdmissibleProof proof,
                               std::uint64_t seed, std::uint64_t samples)
    : base_(std::move(base)), kind_(kind), levels_(std::move(levels)), proof_(proof),
      seed_(seed), samples_(samples) {
    require_structure(!levels_.empty(), "distance family needs at least one level");
    for (const auto& m : levels_) {
        require_structure(m.size() == base_.size(), "level matrix size mismatch");
    }
}

const DistanceMatrix& DistanceFamily::level(int n) const {
    require(n >= 0 && n <= n_max(),
            "distance family level " + std::to_string(n) + " outside materialized range [0," +
                std::to_string(n_max()) + "]");
    return levels_[static_cast<std::size_t>(n)];
}

DistanceFamily scaled_canonical_family(const PointSet& T, double C, int n_max,
                                       AdmissibleProof proof) {
    return scaled_family_from_metric(T, canonical_distance(T), C, n_max, proof);
}

DistanceFamily scaled_family_from_metric(const PointSet& T, const DistanceMatrix& base,
                                         double C, int n_max, AdmissibleProof proof) {
    require(C > 0.0, "scale C must be positive");
    require(n_max >= 0, "n_max must be nonnegative");
    std::vector<DistanceMatrix> levels;
    levels.reserve(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        levels.push_back(base.scaled(C * std::exp2(0.5 * n)));
    }
    return DistanceFamily(T, FamilyKind::ScaledCanonical, std::move(levels), proof);
}

DistanceFamily moment_family_gaussian(const PointSet& T, int n_max) {
    require(n_max >= 0, "n_max must be nonnegative");
    DistanceMatrix d = canonical_distance(T);
    std::vector<DistanceMatrix> levels;
    for (int n = 0; n <= n_max; ++n) {
        levels.push_back(d.scaled(moment_distance_gaussian(1.0, n)));
    }
    return DistanceFamily(T, FamilyKind::Moment, std::move(levels), AdmissibleProof::MomentMarkov);
}

namespace {

std::vector<DistanceMatrix> per_pair_levels(
    const PointSet& T, const std::vector<std::vector<Complex>>& values, int n_max,
    double (*solver)(std::span<const double>, int)) {
    const std::size_t m = T.size();
    require(!values.empty(), "empirical family needs at least one draw");
    for (const auto& row : values) {
        require_structure(row.size() == m, "draw row length mismatch");
    }
    std::vector<DistanceMatrix> levels(n_max + 1, DistanceMatrix(m));
    std::vector<double> diffs(values.size());
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            for (std::size_t k = 0; k < values.size(); ++k) {
                diffs[k] = std::abs(values[k][i] - values[k][j]);
            }
            for (int n = 0; n <= n_max; ++n) {
                levels[n].set(i, j, solver(diffs, n));
            }
        }
    }
    return levels;
}

}  // namespace

DistanceFamily empirical_quantile_family(const PointSet& T,
                                         const std::vector<std::vector<Complex>>& values,
                                         int n_max, std::uint64_t seed) {
    auto levels = per_pair_levels(T, values, n_max, &empirical_quantile_distance);
    return DistanceFamily(T, FamilyKind::Quantile, std::move(levels),
                          AdmissibleProof::EmpiricalLaw, seed, values.size());
}

DistanceFamily empirical_moment_family(const PointSet& T,
                                       const std::vector<std::vector<Complex>>& values,
                                       int n_max, std::uint64_t seed) {
    auto levels = per_pair_levels(T, values, n_max, &moment_distance);
    return DistanceFamily(T, FamilyKind::Moment, std::move(levels),
                          AdmissibleProof::MomentMarkov, seed, values.size());
}

std::vector<AdmissibilityViolation> audit_gaussian_admissibility(
    const DistanceFamily& fam, const DistanceMatrix& canonical, double tol) {
    std::vector<AdmissibilityViolation> out;
    const std::size_t m = canonical.size();
    require_structure(fam.base().size() == m, "audit size mismatch");
    for (int n = 0; n <= fam.n_max(); ++n) {
        for (std::size_t s = 0; s < m; ++s) {
            for (std::size_t t = s + 1; t < m; ++t) {
                const double qbar = gaussian_quantile_distance(canonical.at(s, t), n);
                const double q = fam.level(n).at(s, t);
                if (q < qbar - tol) {
                    out.push_back({static_cast<int>(s), static_cast<int>(t), n, q, qbar});
                }
            }
        }
    }
    return out;
}

}  // namespace chainkit
