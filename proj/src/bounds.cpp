#include "chainkit/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace chainkit {

namespace {

int levels_needed(std::size_t set_size) {
    int needed = 0;
    while (!within_level_cardinality(set_size, needed)) ++needed;
    return needed;  // first n with N_n >= |T|
}

double admissible_c(CanonicalKind kind, int n_max) {
    const double c = kind == CanonicalKind::Gaussian ? gaussian_minimal_admissible_c(n_max)
                                                     : bernoulli_minimal_admissible_c(n_max);
    return c * (1.0 + 1e-12);
}

DistanceFamily admissible_family(CanonicalKind kind, const PointSet& T, int n_max) {
    const AdmissibleProof proof = kind == CanonicalKind::Gaussian
                                      ? AdmissibleProof::GaussianExact
                                      : AdmissibleProof::BernoulliHoeffding;
    return scaled_canonical_family(T, admissible_c(kind, n_max), n_max, proof);
}

ProcessModel canonical_model(CanonicalKind kind, const PointSet& T) {
    if (kind == CanonicalKind::Gaussian) return GaussianCanonical{T};
    return BernoulliCanonical{T};
}

ProcessModel product_model(CanonicalKind kind, const PointSet& U, const PointSet& T) {
    if (kind == CanonicalKind::Gaussian) return ProductGaussian{U, T};
    return ProductBernoulli{U, T};
}

}  // namespace

DecompositionPair DecompositionPair::identity(const PointSet& T) {
    DecompositionPair d;
    d.pi = T.points();
    return d;
}

DecompositionPair DecompositionPair::zero(const PointSet& T) {
    DecompositionPair d;
    d.pi.assign(T.size(), IndexedVector::zero(T.dim(), T.complex_field()));
    return d;
}

DecompositionPair DecompositionPair::greedy_l1(const PointSet& T, double l1_budget) {
    require(l1_budget >= 0.0, "l1 budget must be nonnegative");
    DecompositionPair d;
    for (const auto& t : T.points()) {
        std::vector<std::size_t> order(t.dim());
        for (std::size_t i = 0; i < t.dim(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (t.abs_coord(a) != t.abs_coord(b)) return t.abs_coord(a) > t.abs_coord(b);
            return a < b;
        });
        std::vector<double> re(t.dim(), 0.0), im;
        const bool cplx = t.is_complex();
        if (cplx) im.assign(t.dim(), 0.0);
        double spent = 0.0;
        for (std::size_t i : order) {
            const double mag = t.abs_coord(i);
            if (mag == 0.0 || spent + mag > l1_budget) break;
            spent += mag;
            re[i] = t.re(i);
            if (cplx) im[i] = t.im(i);
        }
        d.pi.push_back(cplx ? IndexedVector(std::move(re), std::move(im))
                            : IndexedVector(std::move(re)));
    }
    return d;
}

PointSet DecompositionPair::T1(const PointSet& T) const {
    validate(T);
    return PointSet(pi);
}

PointSet DecompositionPair::T2(const PointSet& T) const {
    validate(T);
    std::vector<IndexedVector> pts;
    for (std::size_t i = 0; i < T.size(); ++i) pts.push_back(T.point(i) - pi[i]);
    return PointSet(std::move(pts));
}

void DecompositionPair::validate(const PointSet& T) const {
    require_structure(pi.size() == T.size(), "decomposition map must align with T");
    for (std::size_t i = 0; i < T.size(); ++i) {
        require_structure(pi[i].dim() == T.dim(), "decomposition image dimension mismatch");
        if (T.point(i).is_zero()) {
            require_structure(pi[i].is_zero(), "decomposition must map 0 to 0");
        }
    }
}

DecompositionScore evaluate_decomposition(const PointSet& T, const DecompositionPair& dec) {
    dec.validate(T);
    DecompositionScore score;
    score.sup_l1_T1 = dec.T1(T).max_norm1();
    score.gamma2_T2 = gamma2_upper(dec.T2(T));
    return score;
}

BoundReport corollary1_bound(const PointSet& U, const PointSet& T, int tau,
                             std::uint64_t samples, std::uint64_t seed) {
    require(tau >= 4, "Corollary 1 is stated for tau >= 4");
    require_structure(U.dim() == T.dim(), "U and T must share the index set");
    const double gamma2_T = gamma2_upper(T);
    double entropy_term = 0.0;
    for (std::size_t ti = 0; ti < T.size(); ++ti) {
        const DistanceMatrix dt = weighted_distance(U, T.point(ti));
        const auto e = entropy_numbers_fixed(dt, 2 + levels_needed(U.size()));
        double sum = 0.0;
        for (std::size_t n = 0; n < e.size(); ++n) {
            sum += std::exp2(0.5 * static_cast<double>(n)) * e[n];
        }
        entropy_term = std::max(entropy_term, sum);
    }
    const double bound = U.max_norm_inf() * gamma2_T + entropy_term;
    const SupEstimate est =
        estimate_product_sup(ProductGaussian{U, T}, SupMode::Absolute, samples, seed);
    BoundReport r =
        BoundReport::make("corollary1", bound, est.mean, est.std_error, tau, seed, est.samples);
    r.pass = est.mean <= bound + 3.0 * est.std_error;
    return r;
}

PointSet ellipsoid_diagonal_witnesses(const IndexedVector& axes, bool include_origin) {
    std::vector<IndexedVector> pts;
    if (include_origin) pts.push_back(IndexedVector::zero(axes.dim()));
    for (std::size_t i = 0; i < axes.dim(); ++i) {
        std::vector<double> re(axes.dim(), 0.0);
        re[i] = axes.re(i);
        pts.emplace_back(std::move(re));
    }
    return PointSet(std::move(pts));
}

PointSet ellipsoid_boundary_witnesses(const IndexedVector& axes, int count, std::uint64_t seed,
                                      bool include_diagonal) {
    std::vector<IndexedVector> pts;
    pts.push_back(IndexedVector::zero(axes.dim()));
    if (include_diagonal) {
        for (std::size_t i = 0; i < axes.dim(); ++i) {
            for (double sign : {1.0, -1.0}) {
                std::vector<double> re(axes.dim(), 0.0);
                re[i] = sign * axes.re(i);
                pts.emplace_back(std::move(re));
            }
        }
    }
    for (int k = 0; k < count; ++k) {
        CounterRng rng(seed, static_cast<std::uint64_t>(k));
        std::vector<double> v(axes.dim());
        double norm = 0.0;
        for (auto& x : v) {
            x = rng.next_normal();
            norm += x * x;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        std::vector<double> re(axes.dim());
        for (std::size_t i = 0; i < axes.dim(); ++i) re[i] = axes.re(i) * v[i] / norm;
        pts.emplace_back(std::move(re));
    }
    return PointSet(std::move(pts));
}

BoundReport remark1_bound(const IndexedVector& x, const PointSet& T, std::uint64_t samples,
                          std::uint64_t seed) {
    require_structure(x.dim() == T.dim(), "axes dimension mismatch");
    const SupEstimate gT = estimate_sup(GaussianCanonical{T}, SupMode::Absolute, samples,
                                        mix64(seed + 0x67));
    const double delta = canonical_distance(T).max_entry();
    const double bound = x.norm_inf() * gT.mean + delta * x.norm2();
    if (x.is_zero()) {
        BoundReport r = BoundReport::make("remark1", 0.0, 0.0, 0.0, 0, seed, samples);
        r.pass = true;
        return r;
    }
    const PointSet witnesses = ellipsoid_boundary_witnesses(x, 16, mix64(seed + 0x68));
    const SupEstimate est =
        estimate_product_sup(ProductGaussian{witnesses, T}, SupMode::Absolute, samples, seed);
    BoundReport r =
        BoundReport::make("remark1", bound, est.mean, est.std_error, 0, seed, est.samples);
    r.pass = est.mean <= bound + 3.0 * (est.std_error + x.norm_inf() * gT.std_error);
    return r;
}

BoundReport remark2_bound(const IndexedVector& x, const PointSet& T, std::uint64_t samples,
                          std::uint64_t seed) {
    require_structure(x.dim() == T.dim(), "axes dimension mismatch");
    const SupEstimate bT = estimate_sup(BernoulliCanonical{T}, SupMode::Absolute, samples, seed);
    const double bound = x.norm2() * bT.mean;
    // per draw, sup over the ellipsoid of |sum u_i t_i eps_i| is exactly
    // ||x t||_2 by Cauchy-Schwarz, so the LHS needs no sampling at all
    double lhs = 0.0;
    for (const auto& t : T.points()) {
        double s = 0.0;
        for (std::size_t i = 0; i < T.dim(); ++i) {
            const double v = x.abs_coord(i) * t.abs_coord(i);
            s += v * v;
        }
        lhs = std::max(lhs, std::sqrt(s));
    }
    BoundReport r = BoundReport::make("remark2", bound, lhs, 0.0, 0, seed, bT.samples);
    r.pass = bound > 0.0 ? lhs <= bound * (1.0 + 3.0 * (bT.std_error / std::max(bT.mean, 1e-300)))
                         : lhs == 0.0;
    return r;
}

Theorem2Report theorem2_experiment(const PointSet& T, int m, std::vector<int> freqs,
                                   std::uint64_t samples, std::uint64_t seed) {
    require(m >= 1, "group order must be positive");
    require_structure(freqs.size() == T.dim(), "need one frequency per coordinate");
    Theorem2Report out;
    const CharacterBernoulli lhs_model{T, m, freqs};
    const SupEstimate lhs =
        estimate_product_sup(lhs_model, SupMode::Absolute, samples, seed);
    const SupEstimate bT = estimate_sup(BernoulliCanonical{T}, SupMode::Absolute, samples,
                                        mix64(seed + 0x11));
    double single = 0.0, single_se = 0.0;
    for (std::size_t ti = 0; ti < T.size(); ++ti) {
        const PointSet one(std::vector<IndexedVector>{T.point(ti)});
        const SupEstimate s = estimate_product_sup(CharacterBernoulli{one, m, freqs},
                                                   SupMode::Absolute, samples,
                                                   mix64(seed + 0x200 + ti));
        if (s.mean > single) {
            single = s.mean;
            single_se = s.std_error;
        }
    }
    out.b_T = bT.mean;
    out.max_single_t = single;
    const double rhs = bT.mean + single;
    out.report = BoundReport::make("theorem2_K", rhs, lhs.mean,
                                   lhs.std_error + bT.std_error + single_se, 0, seed,
                                   lhs.samples);
    return out;
}

namespace {

BoundReport theorem3_impl(CanonicalKind kind, const PointSet& T, const DistanceFamily& fam,
                          int tau, std::uint64_t samples, std::uint64_t seed) {
    require(tau >= 2, "Theorem 3 requires tau >= 2");
    if (fam.proof() == AdmissibleProof::Unaudited) {
        if (kind == CanonicalKind::Gaussian) {
            const auto violations = audit_gaussian_admissibility(fam, canonical_distance(T));
            if (!violations.empty()) {
                const auto& v = violations.front();
                throw UsageError("family not admissible: q_" + std::to_string(v.n) + "(" +
                                 std::to_string(v.s) + "," + std::to_string(v.t) + ") = " +
                                 std::to_string(v.q) + " < qbar = " + std::to_string(v.qbar) +
                                 (violations.size() > 1
                                      ? " (+" + std::to_string(violations.size() - 1) + " more)"
                                      : ""));
            }
        } else {
            throw UsageError("Bernoulli verification needs a family with an admissibility proof");
        }
    }
    const PartitionTree tree = partition_from_entropy(fam, tau);
    const double gamma = gamma_functional(tree, fam, tau);
    const SupEstimate est =
        estimate_sup(canonical_model(kind, T), SupMode::Increment, samples, seed);
    BoundReport r = BoundReport::make("theorem3", 4.0 * gamma, est.mean, est.std_error, tau, seed,
                                      est.samples);
    r.pass = est.mean <= r.bound + 3.0 * est.std_error;
    return r;
}

}  // namespace

BoundReport verify_theorem3(CanonicalKind kind, const PointSet& T, const DistanceFamily& fam,
                            int tau, std::uint64_t samples, std::uint64_t seed) {
    return theorem3_impl(kind, T, fam, tau, samples, seed);
}

BoundReport verify_theorem3(CanonicalKind kind, const PointSet& T, int tau,
                            std::uint64_t samples, std::uint64_t seed) {
    const int n_max = tau + levels_needed(T.size()) + 2;
    return theorem3_impl(kind, T, admissible_family(kind, T, n_max), tau, samples, seed);
}

BoundReport verify_entropy_bound16(CanonicalKind kind, const PointSet& T, int tau,
                                   std::uint64_t samples, std::uint64_t seed) {
    require(tau >= 3, "the entropy bound requires tau >= 3");
    const int n_levels = levels_needed(T.size()) + 1;
    const DistanceFamily fam = admissible_family(kind, T, tau + n_levels);
    const auto e = entropy_numbers(fam, tau, n_levels);
    double entropy_sum = 0.0;
    for (double v : e) entropy_sum += v;
    const SupEstimate est =
        estimate_sup(canonical_model(kind, T), SupMode::Increment, samples, seed);
    BoundReport r = BoundReport::make("entropy16", 16.0 * entropy_sum, est.mean, est.std_error,
                                      tau, seed, est.samples);
    r.pass = est.mean <= r.bound + 3.0 * est.std_error;
    return r;
}

Theorem4Report verify_theorem4(CanonicalKind kind, const PointSet& U, const PointSet& T, int tau,
                               std::uint64_t samples, std::uint64_t seed) {
    require(tau >= 4, "Theorem 4 requires tau >= 4");
    require_structure(U.dim() == T.dim(), "U and T must share the index set");
    Theorem4Report out;
    const double C = admissible_c(kind, tau + 8);
    const AdmissibleProof proof = kind == CanonicalKind::Gaussian
                                      ? AdmissibleProof::GaussianExact
                                      : AdmissibleProof::BernoulliHoeffding;

    // gamma^tau_{X,U}(T) over q_{n,U} = C 2^{n/2} sup_u d_u
    const int n_max_T = tau + levels_needed(T.size()) + 2;
    const DistanceFamily famU =
        scaled_family_from_metric(T, sup_weighted_distance(T, U), C, n_max_T, proof);
    const PartitionTree tree = partition_from_entropy(famU, tau);
    out.gamma_part = gamma_functional(tree, famU, tau);

    // E^tau_{X,T}(U) = max_t sum_n e^tau_{n,t} over q_{n,t} = C 2^{n/2} d_t
    const int n_levels_U = levels_needed(U.size()) + 1;
    for (std::size_t ti = 0; ti < T.size(); ++ti) {
        const DistanceFamily famT = scaled_family_from_metric(
            U, weighted_distance(U, T.point(ti)), C, tau + n_levels_U, proof);
        const auto e = entropy_numbers(famT, tau, n_levels_U);
        double sum = 0.0;
        for (double v : e) sum += v;
        out.entropy_part = std::max(out.entropy_part, sum);
    }

    const SupEstimate est =
        estimate_product_sup(product_model(kind, U, T), SupMode::Increment, samples, seed);
    out.report = BoundReport::make("theorem4", 24.0 * (out.gamma_part + out.entropy_part),
                                   est.mean, est.std_error, tau, seed, est.samples);
    out.report.pass = est.mean <= out.report.bound + 3.0 * est.std_error;
    return out;
}

}  // namespace chainkit
