#pragma once

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "chainkit/core.hpp"
#include "chainkit/rng.hpp"

// Monte Carlo and exact-enumeration estimators for suprema of canonical
// processes. Fixed (seed, samples) gives bit-identical results regardless of
// worker count: sample j draws from substream hash(seed, j) and partial sums
// merge in fixed chunk order.

namespace chainkit {

struct GaussianCanonical { PointSet T; };
struct BernoulliCanonical { PointSet T; };
struct ProductGaussian { PointSet U, T; };
struct ProductBernoulli { PointSet U, T; };
// X(h,t) = sum_i t_i chi_i(h) eps_i over h in Z_m with chi_i(h) = e^{2 pi i k_i h / m}.
struct CharacterBernoulli { PointSet T; int m = 1; std::vector<int> freqs; };
// sup_f sqrt(mean_i f(X_i)^2) over N i.i.d. draws from `sampler` per sample.
struct EmpiricalSqSum {
    std::vector<std::function<double(double)>> funcs;
    std::function<double(CounterRng&)> sampler;
    int N = 1;
};

using ProcessModel = std::variant<GaussianCanonical, BernoulliCanonical, ProductGaussian,
                                  ProductBernoulli, CharacterBernoulli, EmpiricalSqSum>;

enum class SupMode { Absolute, Increment };
enum class EnumerationPolicy { Auto, ForceExact, ForceMonteCarlo };

struct SupEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    bool exact = false;
};

// E sup_t |X(t)| (Absolute) or E sup_{s,t} |X(t)-X(s)| (Increment).
// Bernoulli models with d <= 20 enumerate all 2^d sign patterns under Auto
// when the family iteration stays within a fixed work budget.
SupEstimate estimate_sup(const ProcessModel& model, SupMode mode, std::uint64_t samples,
                         std::uint64_t seed, EnumerationPolicy policy = EnumerationPolicy::Auto);

// Double supremum over U x T (product and character models only).
SupEstimate estimate_product_sup(const ProcessModel& model, SupMode mode, std::uint64_t samples,
                                 std::uint64_t seed,
                                 EnumerationPolicy policy = EnumerationPolicy::Auto);

// Per-draw process values at every point, for building empirical distance
// families over a shared probability space. values[j][p] = X_j(t_p).
std::vector<std::vector<Complex>> sample_process_values(const ProcessModel& model,
                                                        std::uint64_t draws, std::uint64_t seed);

enum class NormKind { L2, LInf };

struct TailCompareRow {
    double t = 0.0;
    double p_sup = 0.0, p_sup_se = 0.0;    // P(sup_u ||sum u_i v_i eps_i|| >= t)
    double p_base = 0.0, p_base_se = 0.0;  // P(||sum v_i eps_i|| >= t)
    double p_sup_scaled = 0.0;             // exceedance at K1-scaled threshold
};

struct TailCompareResult {
    std::vector<TailCompareRow> rows;
    double K1 = 1.0, K2 = 1.0;  // P(sup >= K1 t) <= K2 P(base >= t) across the grid
    bool exact = false;
    std::uint64_t samples = 0, seed = 0;
};

// Remark-3 style tail comparison in the X_i = v_i eps_i reduction the paper's
// proof uses. `vectors` lists v_i in R^k; U weights them.
TailCompareResult tail_compare(const PointSet& U, const std::vector<IndexedVector>& vectors,
                               std::span<const double> t_grid, std::uint64_t samples,
                               std::uint64_t seed, NormKind norm = NormKind::L2,
                               EnumerationPolicy policy = EnumerationPolicy::Auto);

int worker_count();  // CHAINKIT_THREADS override; never affects results

}  // namespace chainkit
