#include "chainkit/vc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_set>

namespace chainkit {

namespace {

// next subset of the same popcount (Gosper), within `bits` positions
bool next_combination(std::uint32_t& mask, int bits) {
    const std::uint32_t c = mask & static_cast<std::uint32_t>(-static_cast<std::int32_t>(mask));
    const std::uint32_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
    return mask < (std::uint32_t(1) << bits);
}

bool shatters(const SetFamily& fam, std::uint32_t b_mask, int b_size) {
    std::unordered_set<std::uint32_t> traces;
    const std::uint32_t want = std::uint32_t(1) << b_size;
    for (std::uint32_t a : fam.members) {
        // compress a & b_mask onto the low b_size bits
        std::uint32_t trace = 0;
        int pos = 0;
        std::uint32_t rest = b_mask;
        while (rest) {
            const int bit = std::countr_zero(rest);
            if (a >> bit & 1u) trace |= (1u << pos);
            ++pos;
            rest &= rest - 1;
        }
        traces.insert(trace);
        if (traces.size() == want) return true;
    }
    return false;
}

}  // namespace

int vc_dimension(const SetFamily& fam, int cap) {
    require(fam.ground_size <= 24, "VC computation capped at ground size 24");
    require(cap >= 0 && cap <= 12, "VC cap must lie in [0,12]");
    const int ground = static_cast<int>(fam.ground_size);
    int dim = 0;
    for (int k = 1; k <= std::min(cap, ground); ++k) {
        bool found = false;
        std::uint32_t mask = (std::uint32_t(1) << k) - 1u;
        do {
            if (shatters(fam, mask, k)) { found = true; break; }
        } while (next_combination(mask, ground));
        if (!found) break;
        dim = k;
    }
    return dim;
}

namespace {

// Fixed level v on J: each u maps to at most one label (bit set = "low" side);
// J is shattered by this v iff the label map covers all 2^|J| masks.
bool level_shatters(const PointSet& U, std::span<const int> J, std::span<const double> v,
                    double eps, std::vector<int>* witness_out) {
    const std::size_t labels = std::size_t(1) << J.size();
    std::vector<int> witness(labels, -1);
    std::size_t covered = 0;
    for (std::size_t uidx = 0; uidx < U.size(); ++uidx) {
        std::uint32_t label = 0;
        bool dead = false;
        for (std::size_t j = 0; j < J.size(); ++j) {
            const double ui = U.point(uidx).re(static_cast<std::size_t>(J[j]));
            if (ui <= v[j]) {
                label |= (1u << j);
            } else if (ui < v[j] + eps) {
                dead = true;
                break;
            }
        }
        if (dead) continue;
        if (witness[label] < 0) {
            witness[label] = static_cast<int>(uidx);
            if (++covered == labels) {
                if (witness_out) *witness_out = std::move(witness);
                return true;
            }
        }
    }
    return false;
}

bool subset_shattered(const PointSet& U, std::span<const int> J, double eps,
                      const std::vector<std::vector<double>>& coord_values,
                      ShatterWitness* witness) {
    // candidate levels per coordinate: v_j = max over used low-side witnesses
    // of their coordinate, so v_j ranges over the coordinate values of U
    std::vector<std::size_t> idx(J.size(), 0);
    std::vector<double> v(J.size());
    std::uint64_t budget = 50'000'000;
    for (;;) {
        for (std::size_t j = 0; j < J.size(); ++j) {
            v[j] = coord_values[static_cast<std::size_t>(J[j])][idx[j]];
        }
        if (budget-- == 0) {
            throw UsageError("shattering search budget exhausted; reduce |U|, dim or cap");
        }
        std::vector<int> wit;
        if (level_shatters(U, J, v, eps, witness ? &wit : nullptr)) {
            if (witness) {
                witness->J.assign(J.begin(), J.end());
                witness->v = v;
                witness->witness_per_label = std::move(wit);
            }
            return true;
        }
        std::size_t j = 0;
        while (j < J.size()) {
            if (++idx[j] < coord_values[static_cast<std::size_t>(J[j])].size()) break;
            idx[j] = 0;
            ++j;
        }
        if (j == J.size()) return false;
    }
}

}  // namespace

int shattering_dimension(const PointSet& U, double eps, int cap, ShatterWitness* witness) {
    require(U.size() <= 64, "shattering computation capped at 64 points");
    require(U.dim() <= 16, "shattering computation capped at dimension 16");
    require(cap >= 0 && cap <= 4, "shattering cap must lie in [0,4]");
    require(eps > 0.0, "shattering margin must be positive");
    require_structure(!U.complex_field(), "shattering dimension needs a real class");
    const int d = static_cast<int>(U.dim());

    std::vector<std::vector<double>> coord_values(U.dim());
    for (std::size_t c = 0; c < U.dim(); ++c) {
        for (std::size_t p = 0; p < U.size(); ++p) coord_values[c].push_back(U.point(p).re(c));
        std::sort(coord_values[c].begin(), coord_values[c].end());
        coord_values[c].erase(std::unique(coord_values[c].begin(), coord_values[c].end()),
                              coord_values[c].end());
    }

    int dim = 0;
    for (int k = 1; k <= std::min(cap, d); ++k) {
        bool found = false;
        std::vector<int> J(k);
        for (int j = 0; j < k; ++j) J[j] = j;
        for (;;) {
            ShatterWitness local;
            if (subset_shattered(U, J, eps, coord_values, witness ? &local : nullptr)) {
                found = true;
                if (witness) *witness = std::move(local);
                break;
            }
            int j = k - 1;
            while (j >= 0 && J[j] == d - k + j) --j;
            if (j < 0) break;
            ++J[j];
            for (int l = j + 1; l < k; ++l) J[l] = J[l - 1] + 1;
        }
        if (!found) break;
        dim = k;
    }
    return dim;
}

double shattering_integral(const PointSet& U, std::span<const double> eps_grid, int cap) {
    require(!eps_grid.empty(), "shattering integral needs a grid");
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        require(eps_grid[i] > 0.0 && eps_grid[i] <= 1.0, "grid must lie in (0,1]");
        if (i) require(eps_grid[i] > eps_grid[i - 1], "grid must be strictly increasing");
    }
    // antiderivative: int_0^a sqrt(log(2/e)) de = a sqrt(log(2/a)) + sqrt(pi) erfc(sqrt(log(2/a)))
    auto I = [](double a) {
        const double s = std::sqrt(std::log(2.0 / a));
        return a * s + std::sqrt(M_PI) * std::erfc(s);
    };
    std::vector<double> knots(eps_grid.begin(), eps_grid.end());
    if (knots.back() < 1.0) knots.push_back(1.0);
    double total = 0.0;
    // leading stub (0, eps_1) uses the first evaluable vc value
    {
        const int vc0 = shattering_dimension(U, knots.front(), cap);
        if (vc0 > 0) total += std::sqrt(static_cast<double>(vc0)) * I(knots.front());
    }
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const int vc = shattering_dimension(U, knots[i], cap);
        if (vc > 0) total += std::sqrt(static_cast<double>(vc)) * (I(knots[i + 1]) - I(knots[i]));
    }
    return total;
}

BoundReport maximal_inequality_experiment(const SetFamily& fam, const PointSet& T,
                                          std::uint64_t samples, std::uint64_t seed,
                                          EnumerationPolicy policy, int vc_cap) {
    require_structure(fam.ground_size == T.dim(), "family ground set must match T's index set");
    std::vector<IndexedVector> indicators;
    indicators.reserve(fam.size());
    for (std::uint32_t mask : fam.members) {
        std::vector<double> coords(T.dim(), 0.0);
        for (std::size_t i = 0; i < T.dim(); ++i) {
            if (mask >> i & 1u) coords[i] = 1.0;
        }
        indicators.emplace_back(std::move(coords));
    }
    const PointSet U(std::move(indicators));

    const SupEstimate den = estimate_sup(BernoulliCanonical{T}, SupMode::Absolute,
                                         samples, mix64(seed + 1), policy);
    require(den.mean > 0.0, "degenerate denominator: b(T) = 0");
    const SupEstimate num = estimate_product_sup(ProductBernoulli{U, T}, SupMode::Absolute,
                                                 samples, seed, policy);

    const double k_emp = num.mean / den.mean;
    const double rel_se = std::sqrt(
        (num.std_error / num.mean) * (num.std_error / num.mean) +
        (den.std_error / den.mean) * (den.std_error / den.mean));
    const int d = vc_dimension(fam, vc_cap);

    BoundReport r = BoundReport::make("maximal_inequality_K", std::sqrt(static_cast<double>(d)),
                                      k_emp, k_emp * rel_se, 0, seed, num.samples);
    return r;
}

// Sign-normalized support vectors (+-1/sqrt(|S|) on S) sit on the sphere and
// realize the continuum shattering thresholds 2/sqrt(k) exactly, so the grid
// reproduces the unit ball's vc steps at any margin strictly inside a step
// interval. Dimensions <= 3 carry every support plus a half shell and stay
// within the |U| <= 64 cap; dimension 4 drops the size-2 supports (they only
// matter for margins above 1, outside the integral's (0,1] range).
PointSet unit_ball_grid(int dim) {
    require(dim >= 1 && dim <= 4, "unit ball grid supported for dimensions 1..4");
    std::vector<IndexedVector> pts;
    pts.push_back(IndexedVector::zero(static_cast<std::size_t>(dim)));
    const std::uint32_t supports = std::uint32_t(1) << dim;
    const bool half_shell = dim <= 3;
    for (std::uint32_t s = 1; s < supports; ++s) {
        const int k = std::popcount(s);
        if (dim == 4 && k == 2) continue;
        const double mag = 1.0 / std::sqrt(static_cast<double>(k));
        for (std::uint32_t signs = 0; signs < (std::uint32_t(1) << k); ++signs) {
            for (double scale : {1.0, 0.5}) {
                if (scale != 1.0 && !half_shell) continue;
                std::vector<double> coords(static_cast<std::size_t>(dim), 0.0);
                int pos = 0;
                for (int i = 0; i < dim; ++i) {
                    if (s >> i & 1u) {
                        coords[static_cast<std::size_t>(i)] =
                            ((signs >> pos & 1u) ? -1.0 : 1.0) * mag * scale;
                        ++pos;
                    }
                }
                pts.emplace_back(std::move(coords));
            }
        }
    }
    return PointSet(std::move(pts));
}

}  // namespace chainkit
