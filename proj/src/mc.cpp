#include "chainkit/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace chainkit {

int worker_count() {
    if (const char* env = std::getenv("CHAINKIT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 256) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 16u));
}

namespace {

constexpr std::uint64_t kChunk = 2048;
constexpr double kExactWorkBudget = 4e8;

// Deterministic chunked mean/stderr accumulation: chunk partials are computed
// in sample order and merged in chunk order, so worker count never matters.
template <typename PerDraw>
SupEstimate run_mc(std::uint64_t samples, std::uint64_t seed, const PerDraw& fn) {
    require(samples >= 1, "need at least one sample");
    const std::uint64_t n_chunks = (samples + kChunk - 1) / kChunk;
    std::vector<double> sums(n_chunks, 0.0), sqs(n_chunks, 0.0);
    const int workers = std::min<std::uint64_t>(worker_count(), n_chunks);
    std::atomic<std::uint64_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            const std::uint64_t from = c * kChunk;
            const std::uint64_t to = std::min(samples, from + kChunk);
            double s = 0.0, s2 = 0.0;
            for (std::uint64_t j = from; j < to; ++j) {
                CounterRng rng(seed, j);
                const double v = fn(rng);
                s += v;
                s2 += v * v;
            }
            sums[c] = s;
            sqs[c] = s2;
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    double sum = 0.0, sq = 0.0;
    for (std::uint64_t c = 0; c < n_chunks; ++c) { sum += sums[c]; sq += sqs[c]; }
    SupEstimate est;
    est.samples = samples;
    est.seed = seed;
    est.mean = sum / static_cast<double>(samples);
    if (samples > 1) {
        const double var =
            std::max(0.0, (sq - sum * sum / static_cast<double>(samples)) /
                              static_cast<double>(samples - 1));
        est.std_error = std::sqrt(var / static_cast<double>(samples));
    }
    return est;
}

// Every canonical-type model flattens to coefficient rows c[p][i]: the process
// value at pseudo-point p under a draw x is sum_i c[p][i] x_i.
struct FlatModel {
    std::size_t d = 0;
    std::size_t points = 0;
    bool complex_coeffs = false;
    bool bernoulli = false;  // draws are signs instead of normals
    std::vector<double> cre, cim;  // row-major points x d

    void add_point(const IndexedVector& coeff) {
        for (std::size_t i = 0; i < d; ++i) {
            cre.push_back(coeff.re(i));
            if (complex_coeffs) cim.push_back(coeff.im(i));
        }
        ++points;
    }
};

FlatModel flatten(const ProcessModel& model) {
    FlatModel f;
    if (const auto* g = std::get_if<GaussianCanonical>(&model)) {
        f.d = g->T.dim();
        f.complex_coeffs = g->T.complex_field();
        f.bernoulli = false;
        for (const auto& t : g->T.points()) f.add_point(t);
    } else if (const auto* b = std::get_if<BernoulliCanonical>(&model)) {
        f.d = b->T.dim();
        f.complex_coeffs = b->T.complex_field();
        f.bernoulli = true;
        for (const auto& t : b->T.points()) f.add_point(t);
    } else if (const auto* p = std::get_if<ProductGaussian>(&model)) {
        require_structure(p->U.dim() == p->T.dim(), "product model dimension mismatch");
        require(p->U.size() * p->T.size() <= 10'000'000, "product grid exceeds the 10^7 cap");
        f.d = p->T.dim();
        f.complex_coeffs = p->U.complex_field() || p->T.complex_field();
        f.bernoulli = false;
        for (const auto& u : p->U.points()) {
            for (const auto& t : p->T.points()) {
                std::vector<double> re(f.d), im;
                if (f.complex_coeffs) im.resize(f.d);
                for (std::size_t i = 0; i < f.d; ++i) {
                    const Complex c = u.coord(i) * t.coord(i);
                    re[i] = c.real();
                    if (f.complex_coeffs) im[i] = c.imag();
                }
                f.add_point(f.complex_coeffs ? IndexedVector(std::move(re), std::move(im))
                                             : IndexedVector(std::move(re)));
            }
        }
    } else if (const auto* p = std::get_if<ProductBernoulli>(&model)) {
        require_structure(p->U.dim() == p->T.dim(), "product model dimension mismatch");
        require(p->U.size() * p->T.size() <= 10'000'000, "product grid exceeds the 10^7 cap");
        f.d = p->T.dim();
        f.complex_coeffs = p->U.complex_field() || p->T.complex_field();
        f.bernoulli = true;
        for (const auto& u : p->U.points()) {
            for (const auto& t : p->T.points()) {
                std::vector<double> re(f.d), im;
                if (f.complex_coeffs) im.resize(f.d);
                for (std::size_t i = 0; i < f.d; ++i) {
                    const Complex c = u.coord(i) * t.coord(i);
                    re[i] = c.real();
                    if (f.complex_coeffs) im[i] = c.imag();
                }
                f.add_point(f.complex_coeffs ? IndexedVector(std::move(re), std::move(im))
                                             : IndexedVector(std::move(re)));
            }
        }
    } else if (const auto* ch = std::get_if<CharacterBernoulli>(&model)) {
        require(ch->m >= 1, "group order must be positive");
        require_structure(ch->freqs.size() == ch->T.dim(), "frequency count mismatch");
        require(static_cast<std::size_t>(ch->m) * ch->T.size() <= 10'000'000,
                "character grid exceeds the 10^7 cap");
        f.d = ch->T.dim();
        f.complex_coeffs = true;
        f.bernoulli = true;
        for (int h = 0; h < ch->m; ++h) {
            for (const auto& t : ch->T.points()) {
                std::vector<double> re(f.d), im(f.d);
                for (std::size_t i = 0; i < f.d; ++i) {
                    const double ang = 2.0 * M_PI * ch->freqs[i] * h / ch->m;
                    const Complex chi(std::cos(ang), std::sin(ang));
                    const Complex c = t.coord(i) * chi;
                    re[i] = c.real();
                    im[i] = c.imag();
                }
                f.add_point(IndexedVector(std::move(re), std::move(im)));
            }
        }
    } else {
        throw UsageError("model kind not supported by canonical flattening");
    }
    return f;
}

// per-draw reduction: Absolute = max modulus, Increment = max pair distance
struct ValueReducer {
    SupMode mode;
    bool complex_vals;

    double reduce_real(std::span<const double> vals) const {
        if (mode == SupMode::Absolute) {
            double s = 0.0;
            for (double v : vals) s = std::max(s, std::abs(v));
            return s;
        }
        double lo = vals[0], hi = vals[0];
        for (double v : vals) { lo = std::min(lo, v); hi = std::max(hi, v); }
        return hi - lo;
    }

    double reduce_complex(std::span<const double> re, std::span<const double> im) const {
        if (mode == SupMode::Absolute) {
            double s = 0.0;
            for (std::size_t p = 0; p < re.size(); ++p) s = std::max(s, std::hypot(re[p], im[p]));
            return s;
        }
        double s = 0.0;
        for (std::size_t p = 0; p < re.size(); ++p) {
            for (std::size_t q = p + 1; q < re.size(); ++q) {
                s = std::max(s, std::hypot(re[p] - re[q], im[p] - im[q]));
            }
        }
        return s;
    }
};

void eval_values(const FlatModel& f, std::span<const double> x, std::vector<double>& re,
                 std::vector<double>& im) {
    re.assign(f.points, 0.0);
    if (f.complex_coeffs) im.assign(f.points, 0.0);
    for (std::size_t p = 0; p < f.points; ++p) {
        const double* cr = f.cre.data() + p * f.d;
        double sr = 0.0;
        for (std::size_t i = 0; i < f.d; ++i) sr += cr[i] * x[i];
        re[p] = sr;
        if (f.complex_coeffs) {
            const double* ci = f.cim.data() + p * f.d;
            double si = 0.0;
            for (std::size_t i = 0; i < f.d; ++i) si += ci[i] * x[i];
            im[p] = si;
        }
    }
}

double draw_and_reduce(const FlatModel& f, const ValueReducer& red, CounterRng& rng,
                       std::vector<double>& x, std::vector<double>& re,
                       std::vector<double>& im) {
    x.resize(f.d);
    for (std::size_t i = 0; i < f.d; ++i) {
        x[i] = f.bernoulli ? static_cast<double>(rng.next_sign()) : rng.next_normal();
    }
    eval_values(f, x, re, im);
    return f.complex_coeffs ? red.reduce_complex(re, im) : red.reduce_real(re);
}

SupEstimate enumerate_bernoulli(const FlatModel& f, const ValueReducer& red,
                                std::uint64_t seed) {
    require(f.d <= 20, "exact Bernoulli enumeration capped at 20 coordinates");
    const std::uint64_t patterns = std::uint64_t(1) << f.d;
    std::vector<double> x(f.d), re, im;
    double sum = 0.0;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
        for (std::size_t i = 0; i < f.d; ++i) x[i] = (mask >> i & 1u) ? 1.0 : -1.0;
        eval_values(f, x, re, im);
        sum += f.complex_coeffs ? red.reduce_complex(re, im) : red.reduce_real(re);
    }
    SupEstimate est;
    est.mean = sum / static_cast<double>(patterns);
    est.std_error = 0.0;
    est.samples = patterns;
    est.seed = seed;
    est.exact = true;
    return est;
}

double exact_work(const FlatModel& f, const ValueReducer& red) {
    if (f.d > 20) return std::numeric_limits<double>::infinity();
    double per_pattern = static_cast<double>(f.points) * static_cast<double>(f.d);
    if (red.mode == SupMode::Increment && f.complex_coeffs) {
        per_pattern += static_cast<double>(f.points) * static_cast<double>(f.points);
    }
    return std::ldexp(per_pattern, static_cast<int>(f.d));
}

SupEstimate run_flat(const FlatModel& f, SupMode mode, std::uint64_t samples,
                     std::uint64_t seed, EnumerationPolicy policy) {
    const ValueReducer red{mode, f.complex_coeffs};
    if (f.bernoulli) {
        const bool can_exact = f.d <= 20;
        if (policy == EnumerationPolicy::ForceExact) {
            require(can_exact, "exact enumeration requested with d > 20");
            return enumerate_bernoulli(f, red, seed);
        }
        if (policy == EnumerationPolicy::Auto && can_exact &&
            exact_work(f, red) <= kExactWorkBudget) {
            return enumerate_bernoulli(f, red, seed);
        }
    } else {
        require(policy != EnumerationPolicy::ForceExact,
                "exact enumeration applies to Bernoulli models only");
    }
    return run_mc(samples, seed, [&](CounterRng& rng) {
        thread_local std::vector<double> x, re, im;
        return draw_and_reduce(f, red, rng, x, re, im);
    });
}

}  // namespace

SupEstimate estimate_sup(const ProcessModel& model, SupMode mode, std::uint64_t samples,
                         std::uint64_t seed, EnumerationPolicy policy) {
    if (const auto* e = std::get_if<EmpiricalSqSum>(&model)) {
        require(mode == SupMode::Absolute, "empirical sum-of-squares model is absolute-mode only");
        require(policy != EnumerationPolicy::ForceExact,
                "exact enumeration applies to Bernoulli models only");
        require(e->N >= 1, "empirical model needs N >= 1");
        require(!e->funcs.empty(), "empirical model needs at least one function");
        return run_mc(samples, seed, [e](CounterRng& rng) {
            thread_local std::vector<double> xs;
            xs.resize(static_cast<std::size_t>(e->N));
            for (auto& x : xs) x = e->sampler(rng);
            double sup = 0.0;
            for (const auto& f : e->funcs) {
                double s = 0.0;
                for (double x : xs) {
                    const double v = f(x);
                    s += v * v;
                }
                sup = std::max(sup, s / static_cast<double>(e->N));
            }
            return std::sqrt(sup);
        });
    }
    return run_flat(flatten(model), mode, samples, seed, policy);
}

SupEstimate estimate_product_sup(const ProcessModel& model, SupMode mode, std::uint64_t samples,
                                 std::uint64_t seed, EnumerationPolicy policy) {
    require(std::holds_alternative<ProductGaussian>(model) ||
                std::holds_alternative<ProductBernoulli>(model) ||
                std::holds_alternative<CharacterBernoulli>(model),
            "estimate_product_sup needs a product or character model");
    return run_flat(flatten(model), mode, samples, seed, policy);
}

std::vector<std::vector<Complex>> sample_process_values(const ProcessModel& model,
                                                        std::uint64_t draws,
                                                        std::uint64_t seed) {
    require(std::holds_alternative<GaussianCanonical>(model) ||
                std::holds_alternative<BernoulliCanonical>(model) ||
                std::holds_alternative<CharacterBernoulli>(model),
            "per-point value sampling supports canonical and character models");
    const FlatModel f = flatten(model);
    std::vector<std::vector<Complex>> values(draws, std::vector<Complex>(f.points));
    std::vector<double> x(f.d), re, im;
    for (std::uint64_t j = 0; j < draws; ++j) {
        CounterRng rng(seed, j);
        for (std::size_t i = 0; i < f.d; ++i) {
            x[i] = f.bernoulli ? static_cast<double>(rng.next_sign()) : rng.next_normal();
        }
        eval_values(f, x, re, im);
        for (std::size_t p = 0; p < f.points; ++p) {
            values[j][p] = Complex(re[p], f.complex_coeffs ? im[p] : 0.0);
        }
    }
    return values;
}

namespace {

struct TailDraw { double sup = 0.0, base = 0.0; };

TailDraw tail_eval(const PointSet& U, const std::vector<IndexedVector>& vectors,
                   NormKind norm, std::span<const double> signs) {
    const std::size_t d = vectors.size();
    const std::size_t k = vectors.front().dim();
    auto norm_of = [&](const std::vector<double>& v) {
        if (norm == NormKind::L2) {
            double s = 0.0;
            for (double x : v) s += x * x;
            return std::sqrt(s);
        }
        double s = 0.0;
        for (double x : v) s = std::max(s, std::abs(x));
        return s;
    };
    std::vector<double> acc(k, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t c = 0; c < k; ++c) acc[c] += signs[i] * vectors[i].re(c);
    }
    TailDraw out;
    out.base = norm_of(acc);
    std::vector<double> weighted(k);
    for (std::size_t uidx = 0; uidx < U.size(); ++uidx) {
        std::fill(weighted.begin(), weighted.end(), 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            const double w = U.point(uidx).re(i) * signs[i];
            for (std::size_t c = 0; c < k; ++c) weighted[c] += w * vectors[i].re(c);
        }
        out.sup = std::max(out.sup, norm_of(weighted));
    }
    return out;
}

double wilson_halfwidth(double p_hat, double n) {
    // z = 1 score interval half-width, a stderr-scale uncertainty for proportions
    const double z2 = 1.0;
    const double denom = 1.0 + z2 / n;
    return std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)) / denom;
}

}  // namespace

TailCompareResult tail_compare(const PointSet& U, const std::vector<IndexedVector>& vectors,
                               std::span<const double> t_grid, std::uint64_t samples,
                               std::uint64_t seed, NormKind norm, EnumerationPolicy policy) {
    require(!t_grid.empty(), "tail comparison needs a nonempty threshold grid");
    require(!vectors.empty(), "tail comparison needs the vector list");
    require_structure(U.dim() == vectors.size(), "U dimension must match the vector count");
    const std::size_t k = vectors.front().dim();
    for (const auto& v : vectors) {
        require_structure(v.dim() == k && !v.is_complex(), "vectors must be real with equal dim");
    }
    const std::size_t d = vectors.size();
    const bool can_exact = d <= 20;
    const double exact_cost =
        can_exact ? std::ldexp(static_cast<double>(U.size() * d * k), static_cast<int>(d))
                  : std::numeric_limits<double>::infinity();
    bool exact = false;
    if (policy == EnumerationPolicy::ForceExact) {
        require(can_exact, "exact enumeration requested with d > 20");
        exact = true;
    } else if (policy == EnumerationPolicy::Auto && exact_cost <= kExactWorkBudget) {
        exact = true;
    }

    std::vector<TailDraw> dr;
    if (exact) {
        const std::uint64_t patterns = std::uint64_t(1) << d;
        dr.resize(patterns);
        std::vector<double> signs(d);
        for (std::uint64_t mask = 0; mask < patterns; ++mask) {
            for (std::size_t i = 0; i < d; ++i) signs[i] = (mask >> i & 1u) ? 1.0 : -1.0;
            dr[mask] = tail_eval(U, vectors, norm, signs);
        }
    } else {
        dr.resize(samples);
        std::vector<double> signs(d);
        for (std::uint64_t j = 0; j < samples; ++j) {
            CounterRng rng(seed, j);
            for (std::size_t i = 0; i < d; ++i) signs[i] = static_cast<double>(rng.next_sign());
            dr[j] = tail_eval(U, vectors, norm, signs);
        }
    }

    TailCompareResult out;
    out.exact = exact;
    out.samples = dr.size();
    out.seed = seed;
    const double n = static_cast<double>(dr.size());
    auto p_sup_at = [&](double thr) {
        std::size_t c = 0;
        for (const auto& x : dr) c += x.sup >= thr;
        return static_cast<double>(c) / n;
    };
    auto p_base_at = [&](double thr) {
        std::size_t c = 0;
        for (const auto& x : dr) c += x.base >= thr;
        return static_cast<double>(c) / n;
    };

    static constexpr double kK1Candidates[] = {1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0, 8.0};
    double best_score = std::numeric_limits<double>::infinity();
    for (double k1 : kK1Candidates) {
        double k2 = 0.0;
        for (double t : t_grid) {
            const double ps = p_sup_at(k1 * t);
            const double pb = p_base_at(t);
            if (pb == 0.0) {
                if (ps > 0.0) { k2 = std::numeric_limits<double>::infinity(); break; }
            } else {
                k2 = std::max(k2, ps / pb);
            }
        }
        k2 = std::max(k2, 1e-12);
        const double score = std::max(k1, k2);
        if (score < best_score) {
            best_score = score;
            out.K1 = k1;
            out.K2 = k2;
        }
    }
    for (double t : t_grid) {
        TailCompareRow row;
        row.t = t;
        row.p_sup = p_sup_at(t);
        row.p_base = p_base_at(t);
        row.p_sup_scaled = p_sup_at(out.K1 * t);
        row.p_sup_se = exact ? 0.0 : wilson_halfwidth(row.p_sup, n);
        row.p_base_se = exact ? 0.0 : wilson_halfwidth(row.p_base, n);
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace chainkit
