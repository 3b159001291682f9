#include "chainkit/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace chainkit {

double CatalogFunction::operator()(double x) const {
    switch (kind) {
        case Kind::Affine:
            return a * x + b;
        case Kind::ClippedAffine:
            return std::clamp(a * x + b, lo, hi);
        case Kind::Step:
            return x >= threshold ? height : 0.0;
    }
    return 0.0;
}

bool CatalogFunction::is_zero() const {
    switch (kind) {
        case Kind::Affine:
            return a == 0.0 && b == 0.0;
        case Kind::ClippedAffine:
            return (a == 0.0 && std::clamp(b, lo, hi) == 0.0) || (lo == 0.0 && hi == 0.0);
        case Kind::Step:
            return height == 0.0;
    }
    return false;
}

CatalogFunction CatalogFunction::affine(double a, double b) {
    CatalogFunction f;
    f.kind = Kind::Affine;
    f.a = a;
    f.b = b;
    return f;
}

CatalogFunction CatalogFunction::clipped(double a, double b, double lo, double hi) {
    require(lo <= hi, "clip bounds out of order");
    CatalogFunction f;
    f.kind = Kind::ClippedAffine;
    f.a = a;
    f.b = b;
    f.lo = lo;
    f.hi = hi;
    return f;
}

CatalogFunction CatalogFunction::step(double height, double threshold) {
    CatalogFunction f;
    f.kind = Kind::Step;
    f.height = height;
    f.threshold = threshold;
    return f;
}

namespace {

// breakpoints where the function changes linear piece
void collect_breakpoints(const CatalogFunction& f, double lo, double hi, std::set<double>& bp) {
    switch (f.kind) {
        case CatalogFunction::Kind::Affine:
            break;
        case CatalogFunction::Kind::ClippedAffine:
            if (f.a != 0.0) {
                for (double level : {f.lo, f.hi}) {
                    const double x = (level - f.b) / f.a;
                    if (x > lo && x < hi) bp.insert(x);
                }
            }
            break;
        case CatalogFunction::Kind::Step:
            if (f.threshold > lo && f.threshold < hi) bp.insert(f.threshold);
            break;
    }
}

}  // namespace

double sup_abs_difference(const CatalogFunction& f, const CatalogFunction& g, double dom_lo,
                          double dom_hi) {
    require(dom_lo < dom_hi, "empty domain");
    std::set<double> bp{dom_lo, dom_hi};
    collect_breakpoints(f, dom_lo, dom_hi, bp);
    collect_breakpoints(g, dom_lo, dom_hi, bp);
    // |f-g| is piecewise linear between consecutive breakpoints; steps jump at
    // the breakpoint itself, so evaluate both one-sided limits via midpoints
    // pushed to the ends of each open piece plus the knots themselves.
    std::vector<double> knots(bp.begin(), bp.end());
    double sup = 0.0;
    auto probe = [&](double x) { sup = std::max(sup, std::abs(f(x) - g(x))); };
    for (std::size_t i = 0; i < knots.size(); ++i) {
        probe(knots[i]);
        if (i + 1 < knots.size()) {
            const double l = knots[i], r = knots[i + 1];
            const double eps = std::max(1e-12, (r - l) * 1e-9);
            probe(std::min(l + eps, r));
            probe(std::max(r - eps, l));
        }
    }
    return sup;
}

double Sampler::draw(CounterRng& rng) const {
    switch (kind) {
        case SamplerKind::Uniform01:
            return rng.next_uniform();
        case SamplerKind::StdNormal:
            return rng.next_normal();
        case SamplerKind::Discrete: {
            const double u = rng.next_uniform();
            double acc = 0.0;
            for (std::size_t i = 0; i < values.size(); ++i) {
                acc += weights[i];
                if (u <= acc) return values[i];
            }
            return values.back();
        }
    }
    return 0.0;
}

Sampler Sampler::uniform01() { return Sampler{}; }

Sampler Sampler::std_normal() {
    Sampler s;
    s.kind = SamplerKind::StdNormal;
    return s;
}

Sampler Sampler::discrete(std::vector<double> values, std::vector<double> weights) {
    require(!values.empty() && values.size() == weights.size(),
            "discrete sampler needs matching values and weights");
    double total = 0.0;
    for (double w : weights) {
        require(w >= 0.0, "discrete weights must be nonnegative");
        total += w;
    }
    require(total > 0.0, "discrete weights must not all vanish");
    for (double& w : weights) w /= total;
    Sampler s;
    s.kind = SamplerKind::Discrete;
    s.values = std::move(values);
    s.weights = std::move(weights);
    return s;
}

FunctionFamily::FunctionFamily(std::vector<CatalogFunction> funcs, DistanceMatrix d1,
                               DistanceMatrix d2)
    : funcs_(std::move(funcs)), d1_(std::move(d1)), d2_(std::move(d2)) {
    require_structure(d1_.size() == funcs_.size() && d2_.size() == funcs_.size(),
                      "distance matrices must match the family size");
    for (std::size_t i = 0; i < funcs_.size(); ++i) {
        if (funcs_[i].is_zero()) { zero_index_ = static_cast<int>(i); break; }
    }
    require(zero_index_ >= 0, "function family must contain the zero function");
}

FunctionFamily FunctionFamily::bounded_sup_family(std::vector<CatalogFunction> funcs,
                                                  double dom_lo, double dom_hi) {
    const std::size_t m = funcs.size();
    DistanceMatrix d1(m), d2(m);
    const double scale = std::sqrt(std::exp(1.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            d2.set(i, j, scale * sup_abs_difference(funcs[i], funcs[j], dom_lo, dom_hi));
        }
    }
    return FunctionFamily(std::move(funcs), std::move(d1), std::move(d2));
}

std::vector<TailAuditRow> audit_tail_condition(const FunctionFamily& F, const Sampler& sampler,
                                               std::span<const double> t_grid,
                                               std::uint64_t samples, std::uint64_t seed) {
    require(!t_grid.empty(), "tail audit needs a t grid");
    require(samples >= 1, "tail audit needs samples");
    const std::size_t m = F.size();
    std::vector<TailAuditRow> rows;
    std::vector<double> xs(samples);
    for (std::uint64_t j = 0; j < samples; ++j) {
        CounterRng rng(seed, j);
        xs[j] = sampler.draw(rng);
    }
    for (std::size_t fi = 0; fi < m; ++fi) {
        for (std::size_t gi = fi + 1; gi < m; ++gi) {
            const double d1 = F.d1().at(fi, gi);
            const double d2 = F.d2().at(fi, gi);
            for (double t : t_grid) {
                const double thr = d1 * t + d2 * std::sqrt(t);
                std::size_t count = 0;
                for (double x : xs) {
                    const double diff = std::abs(F.function(fi)(x) - F.function(gi)(x));
                    if (diff > thr) ++count;
                }
                TailAuditRow row;
                row.f = static_cast<int>(fi);
                row.g = static_cast<int>(gi);
                row.t = t;
                row.freq = static_cast<double>(count) / static_cast<double>(samples);
                row.bound = std::min(1.0, 2.0 * std::exp(-t));
                const double se =
                    std::sqrt(std::max(row.freq * (1.0 - row.freq), 1.0 / samples) /
                              static_cast<double>(samples));
                row.excess_sigma = (row.freq - row.bound) / se;
                row.flagged = row.excess_sigma > 3.0;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

namespace {

PointSet family_index_set(const FunctionFamily& F) {
    // partition machinery only needs |F| labels; index points stand in
    std::vector<IndexedVector> pts;
    for (std::size_t i = 0; i < F.size(); ++i) {
        pts.push_back(IndexedVector({static_cast<double>(i)}));
    }
    return PointSet(std::move(pts));
}

}  // namespace

GammaPair gamma_pair_upper(const FunctionFamily& F) {
    GammaPair out;
    out.partition = combined_partition_build(family_index_set(F), F.d1(), F.d2());
    out.gamma1 = out.partition.combined_gamma1;
    out.gamma2 = out.partition.combined_gamma2;
    return out;
}

double gamma_i_upper(const FunctionFamily& F, int i) {
    require(i == 1 || i == 2, "gamma index must be 1 or 2");
    const GammaPair pair = gamma_pair_upper(F);
    return i == 1 ? pair.gamma1 : pair.gamma2;
}

FunctionFamily d2bar_reduction(const FunctionFamily& F) {
    return FunctionFamily(F.functions(), F.d1(),
                          DistanceMatrix::entrywise_max(F.d1(), F.d2()));
}

BoundReport theorem6_bound(const FunctionFamily& F, int N, const Sampler& sampler,
                           std::uint64_t samples, std::uint64_t seed) {
    require(N >= 1, "N must be positive");
    // d2 need not dominate d1; switch to max(d1, d2) when it does not
    bool dominated = true;
    for (std::size_t i = 0; i < F.size() && dominated; ++i) {
        for (std::size_t j = i + 1; j < F.size(); ++j) {
            if (F.d2().at(i, j) < F.d1().at(i, j)) { dominated = false; break; }
        }
    }
    const FunctionFamily& fam = F;
    const FunctionFamily reduced = dominated ? F : d2bar_reduction(F);
    const FunctionFamily& use = dominated ? fam : reduced;

    const GammaPair pair = gamma_pair_upper(use);
    const double bound = (pair.gamma1 + pair.gamma2) / std::sqrt(static_cast<double>(N)) +
                         use.delta1() + use.delta2();

    EmpiricalSqSum model;
    model.N = N;
    for (const auto& f : use.functions()) {
        model.funcs.emplace_back([f](double x) { return f(x); });
    }
    model.sampler = [sampler](CounterRng& rng) { return sampler.draw(rng); };
    const SupEstimate est = estimate_sup(model, SupMode::Absolute, samples, seed);

    BoundReport r = BoundReport::make("theorem6", bound, est.mean, est.std_error, 0, seed,
                                      est.samples);
    r.pass = est.mean <= bound + 3.0 * est.std_error;
    return r;
}

}  // namespace chainkit
