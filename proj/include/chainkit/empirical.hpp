#pragma once

#include <span>
#include <vector>

#include "chainkit/mc.hpp"
#include "chainkit/partition.hpp"

// Theorem-6 pipeline: tail-certified distance pairs (d1, d2) on a function
// family, gamma_1/gamma_2 over one combined partition, and the sum-of-squares
// bound paired with its Monte Carlo estimate.

namespace chainkit {

// Piecewise-linear catalog: affine a x + b, clipped affine clamp(a x + b, lo, hi),
// and step h * 1{x >= threshold}.
struct CatalogFunction {
    enum class Kind { Affine, ClippedAffine, Step };
    Kind kind = Kind::Affine;
    double a = 0.0, b = 0.0;
    double lo = -1.0, hi = 1.0;
    double height = 0.0, threshold = 0.0;

    double operator()(double x) const;
    bool is_zero() const;

    static CatalogFunction affine(double a, double b);
    static CatalogFunction clipped(double a, double b, double lo, double hi);
    static CatalogFunction step(double height, double threshold);
};

// Exact sup_{x in [lo, hi]} |f - g| for catalog functions (piecewise linear
// with finitely many breakpoints; the sup is attained at piece endpoints).
double sup_abs_difference(const CatalogFunction& f, const CatalogFunction& g, double dom_lo,
                          double dom_hi);

enum class SamplerKind { Uniform01, StdNormal, Discrete };

struct Sampler {
    SamplerKind kind = SamplerKind::Uniform01;
    std::vector<double> values, weights;  // Discrete only

    double draw(CounterRng& rng) const;
    static Sampler uniform01();
    static Sampler std_normal();
    static Sampler discrete(std::vector<double> values, std::vector<double> weights);
};

class FunctionFamily {
public:
    FunctionFamily(std::vector<CatalogFunction> funcs, DistanceMatrix d1, DistanceMatrix d2);

    // d1 = 0 and d2 = sqrt(e) sup|f-g| certify (efka7) for families bounded on
    // [dom_lo, dom_hi]: past t = 1/e the threshold clears the range, below it
    // the bound 2 e^{-t} >= 2/e^{1/e} > 1 is vacuous.
    static FunctionFamily bounded_sup_family(std::vector<CatalogFunction> funcs, double dom_lo,
                                             double dom_hi);

    std::size_t size() const { return funcs_.size(); }
    const CatalogFunction& function(std::size_t i) const { return funcs_[i]; }
    const std::vector<CatalogFunction>& functions() const { return funcs_; }
    const DistanceMatrix& d1() const { return d1_; }
    const DistanceMatrix& d2() const { return d2_; }
    bool contains_zero() const { return zero_index_ >= 0; }
    int zero_index() const { return zero_index_; }

    double delta1() const { return d1_.max_entry(); }
    double delta2() const { return d2_.max_entry(); }

private:
    std::vector<CatalogFunction> funcs_;
    DistanceMatrix d1_, d2_;
    int zero_index_ = -1;
};

struct TailAuditRow {
    int f = 0, g = 0;
    double t = 0.0;
    double freq = 0.0;      // empirical exceedance of d1 t + d2 sqrt(t)
    double bound = 0.0;     // min(1, 2 e^{-t})
    double excess_sigma = 0.0;
    bool flagged = false;   // freq above the bound beyond 3 sigma
};

std::vector<TailAuditRow> audit_tail_condition(const FunctionFamily& F, const Sampler& sampler,
                                               std::span<const double> t_grid,
                                               std::uint64_t samples, std::uint64_t seed);

struct GammaPair {
    CombinedPartitionResult partition;
    double gamma1 = 0.0, gamma2 = 0.0;  // combined-tree values, weights 2^{n/i}
};

// One combined partition serves both functionals; the shifted intersection
// certifies gamma_i(combined) <= (1 + 2^{1/i}) * gamma_i(dedicated tree).
GammaPair gamma_pair_upper(const FunctionFamily& F);
double gamma_i_upper(const FunctionFamily& F, int i);

// Replaces d2 by max(d1, d2); on any shared tree the gamma_2 sum of the new
// metric stays below the gamma_1 + gamma_2 sums of the old pair.
FunctionFamily d2bar_reduction(const FunctionFamily& F);

// K = 1 assembly of N^{-1/2}(gamma_1 + gamma_2) + Delta_1 + Delta_2 against
// the Monte Carlo estimate of E sup_f (N^{-1} sum f(X_i)^2)^{1/2}.
// Applies the d2bar reduction automatically when d2 fails to dominate d1.
BoundReport theorem6_bound(const FunctionFamily& F, int N, const Sampler& sampler,
                           std::uint64_t samples, std::uint64_t seed);

}  // namespace chainkit
