#pragma once

#include <span>
#include <vector>

#include "chainkit/core.hpp"

// Distance families q_n on a point set: exact Gaussian quantile distances
// solving E(|D|/q - 1)_+ = 1/N_n, empirical quantile distances over shared
// process draws, moment distances 2*||D||_{2^n}, and scaled canonical
// families C * 2^{n/2} * d.

namespace chainkit {

class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t m) : m_(m), a_(m * m, 0.0) {}

    std::size_t size() const { return m_; }
    double at(std::size_t i, std::size_t j) const { return a_[i * m_ + j]; }
    void set(std::size_t i, std::size_t j, double v);

    double max_entry() const;
    double min_positive_entry() const;
    double diameter_of(std::span<const int> cell) const;

    // Candidate radii for intrinsic covers: sorted distinct entries incl. 0.
    std::vector<double> sorted_distinct_values() const;

    // Largest value of d(u,w) - d(u,v) - d(v,w) over index triples.
    double triangle_defect() const;

    DistanceMatrix scaled(double c) const;
    static DistanceMatrix entrywise_max(const DistanceMatrix& a, const DistanceMatrix& b);

private:
    std::size_t m_ = 0;
    std::vector<double> a_;
};

DistanceMatrix canonical_distance(const PointSet& T);
DistanceMatrix weighted_distance(const PointSet& T, const IndexedVector& w);
// sup over u in U of the u-weighted distance on T (the q_{n,U} base metric)
DistanceMatrix sup_weighted_distance(const PointSet& T, const PointSet& U);

// The Gaussian quantile distance for increment sd sigma at level n: the unique
// q > 0 with E(|Z| sigma / q - 1)_+ = 1/N_n. Homogeneous of degree 1 in sigma.
double gaussian_quantile_distance(double sigma, int n);
double gaussian_quantile_ratio(int n);  // qbar_n(1) / 2^{n/2}

// Quantile distance of the empirical law supported on |X(t)-X(s)| draws.
double empirical_quantile_distance(std::span<const double> diff_samples, int n);

// 2 * (E|D|^{2^n})^{1/2^n} over the empirical law (log-domain accumulation).
double moment_distance(std::span<const double> diff_samples, int n);
// Exact Gaussian moment distance for increment sd sigma.
double moment_distance_gaussian(double sigma, int n);

// Smallest C with C * 2^{n/2} * sigma >= qbar_n(sigma) for all n <= n_max.
double gaussian_minimal_admissible_c(int n_max);
// C making the Hoeffding tail certificate pass for Bernoulli increments
// with sd proxy d(s,t), all n <= n_max.
double bernoulli_minimal_admissible_c(int n_max);

enum class FamilyKind { Quantile, Moment, ScaledCanonical };

enum class AdmissibleProof {
    GaussianExact,       // level-wise dominance of the exact Gaussian quantile
    BernoulliHoeffding,  // scaled family with C >= bernoulli_minimal_admissible_c
    MomentMarkov,        // moment family; Markov gives E(|D|/q - 1)_+ <= 1/N_n
    EmpiricalLaw,        // quantile distances of the empirical law itself
    Unaudited
};

class DistanceFamily {
public:
    DistanceFamily(PointSet base, FamilyKind kind, std::vector<DistanceMatrix> levels,
                   AdmissibleProof proof, std::uint64_t seed = 0, std::uint64_t samples = 0);

    const PointSet& base() const { return base_; }
    FamilyKind kind() const { return kind_; }
    int n_max() const { return static_cast<int>(levels_.size()) - 1; }
    const DistanceMatrix& level(int n) const;
    AdmissibleProof proof() const { return proof_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t sample_count() const { return samples_; }

private:
    PointSet base_;
    FamilyKind kind_;
    std::vector<DistanceMatrix> levels_;
    AdmissibleProof proof_;
    std::uint64_t seed_;
    std::uint64_t samples_;
};

// q_n = C * 2^{n/2} * canonical distance.
DistanceFamily scaled_canonical_family(const PointSet& T, double C, int n_max,
                                       AdmissibleProof proof = AdmissibleProof::Unaudited);
// q_n = C * 2^{n/2} * base for an arbitrary base metric on T (d_U, d_t, ...).
DistanceFamily scaled_family_from_metric(const PointSet& T, const DistanceMatrix& base,
                                         double C, int n_max,
                                         AdmissibleProof proof = AdmissibleProof::Unaudited);
// Exact Gaussian moment family: q_n(s,t) = 2 d(s,t) (E|Z|^{2^n})^{1/2^n}.
DistanceFamily moment_family_gaussian(const PointSet& T, int n_max);

// Empirical families over shared draws: values[j][p] is the j-th draw of the
// process at point p (modulus differences feed the per-pair sample sets).
DistanceFamily empirical_quantile_family(const PointSet& T,
                                         const std::vector<std::vector<Complex>>& values,
                                         int n_max, std::uint64_t seed);
DistanceFamily empirical_moment_family(const PointSet& T,
                                       const std::vector<std::vector<Complex>>& values,
                                       int n_max, std::uint64_t seed);

struct AdmissibilityViolation {
    int s = 0, t = 0, n = 0;
    double q = 0.0, qbar = 0.0;
};

// Entrywise check q_n(s,t) >= qbar_n(d(s,t)) for a Gaussian canonical model.
std::vector<AdmissibilityViolation> audit_gaussian_admissibility(
    const DistanceFamily& fam, const DistanceMatrix& canonical, double tol = 1e-9);

}  // namespace chainkit
