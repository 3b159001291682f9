#include "chainkit/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

namespace chainkit {

void require(bool cond, const std::string& message) {
    if (!cond) throw UsageError(message);
}

void require_structure(bool cond, const std::string& message) {
    if (!cond) throw StructuralError(message);
}

namespace {

void check_finite(const std::vector<double>& v, const char* part) {
    for (double x : v) {
        require_structure(std::isfinite(x), std::string("non-finite ") + part + " coordinate");
    }
}

}  // namespace

IndexedVector::IndexedVector(std::vector<double> re) : re_(std::move(re)) {
    check_finite(re_, "real");
}

IndexedVector::IndexedVector(std::vector<double> re, std::vector<double> im)
    : re_(std::move(re)), im_(std::move(im)) {
    require_structure(im_.empty() || im_.size() == re_.size(),
                      "imaginary part length mismatch");
    check_finite(re_, "real");
    check_finite(im_, "imaginary");
    if (!im_.empty() && std::all_of(im_.begin(), im_.end(), [](double x) { return x == 0.0; })) {
        // keep the complex tag only when explicitly constructed with an im part
    }
}

IndexedVector IndexedVector::zero(std::size_t dim, bool complex_field) {
    if (complex_field) return IndexedVector(std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0));
    return IndexedVector(std::vector<double>(dim, 0.0));
}

IndexedVector IndexedVector::unit(std::size_t dim, std::size_t axis, double scale) {
    std::vector<double> re(dim, 0.0);
    re.at(axis) = scale;
    return IndexedVector(std::move(re));
}

double IndexedVector::abs_coord(std::size_t i) const {
    if (im_.empty()) return std::abs(re_[i]);
    return std::hypot(re_[i], im_[i]);
}

double IndexedVector::norm1() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) s += abs_coord(i);
    return s;
}

double IndexedVector::norm2() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        const double a = abs_coord(i);
        s += a * a;
    }
    return std::sqrt(s);
}

double IndexedVector::norm_inf() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) s = std::max(s, abs_coord(i));
    return s;
}

bool IndexedVector::is_zero() const {
    for (std::size_t i = 0; i < dim(); ++i) {
        if (re_[i] != 0.0 || im(i) != 0.0) return false;
    }
    return true;
}

bool IndexedVector::operator==(const IndexedVector& o) const {
    if (dim() != o.dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (re_[i] != o.re(i) || im(i) != o.im(i)) return false;
    }
    return true;
}

IndexedVector operator-(const IndexedVector& a, const IndexedVector& b) {
    require_structure(a.dim() == b.dim(), "vector dimension mismatch");
    std::vector<double> re(a.dim()), im;
    bool cplx = a.is_complex() || b.is_complex();
    if (cplx) im.resize(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        re[i] = a.re(i) - b.re(i);
        if (cplx) im[i] = a.im(i) - b.im(i);
    }
    return cplx ? IndexedVector(std::move(re), std::move(im)) : IndexedVector(std::move(re));
}

IndexedVector operator+(const IndexedVector& a, const IndexedVector& b) {
    require_structure(a.dim() == b.dim(), "vector dimension mismatch");
    std::vector<double> re(a.dim()), im;
    bool cplx = a.is_complex() || b.is_complex();
    if (cplx) im.resize(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        re[i] = a.re(i) + b.re(i);
        if (cplx) im[i] = a.im(i) + b.im(i);
    }
    return cplx ? IndexedVector(std::move(re), std::move(im)) : IndexedVector(std::move(re));
}

namespace {

std::uint64_t hash_point(const IndexedVector& p) {
    std::uint64_t h = 0x243F6A8885A308D3ull;
    auto fold = [&h](double x) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, sizeof bits);
        h ^= bits + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    };
    for (std::size_t i = 0; i < p.dim(); ++i) {
        fold(p.re(i));
        fold(p.im(i));
    }
    return h;
}

}  // namespace

PointSet::PointSet(std::vector<IndexedVector> points) {
    require_structure(!points.empty(), "point set must be nonempty");
    dim_ = points.front().dim();
    for (const auto& p : points) {
        require_structure(p.dim() == dim_, "point dimension mismatch in point set");
        complex_ = complex_ || p.is_complex();
    }
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> seen;
    for (auto& p : points) {
        auto& bucket = seen[hash_point(p)];
        bool dup = false;
        for (std::size_t idx : bucket) {
            if (points_[idx] == p) { dup = true; break; }
        }
        if (!dup) {
            bucket.push_back(points_.size());
            points_.push_back(std::move(p));
        }
    }
    for (const auto& p : points_) {
        if (p.is_zero()) { contains_origin_ = true; break; }
    }
}

double PointSet::max_norm1() const {
    double s = 0.0;
    for (const auto& p : points_) s = std::max(s, p.norm1());
    return s;
}

double PointSet::max_norm2() const {
    double s = 0.0;
    for (const auto& p : points_) s = std::max(s, p.norm2());
    return s;
}

double PointSet::max_norm_inf() const {
    double s = 0.0;
    for (const auto& p : points_) s = std::max(s, p.norm_inf());
    return s;
}

SetFamily::SetFamily(std::size_t ground, std::vector<std::uint32_t> member_masks)
    : ground_size(ground), members(std::move(member_masks)) {
    require_structure(ground_size <= 32, "ground set larger than 32 not representable");
    const std::uint32_t full = ground_size == 32 ? ~0u : ((1u << ground_size) - 1u);
    for (std::size_t i = 0; i < members.size(); ++i) {
        require_structure((members[i] & ~full) == 0, "family member outside ground set");
        for (std::size_t j = 0; j < i; ++j) {
            require_structure(members[i] != members[j], "duplicate family member");
        }
    }
    require_structure(!members.empty(), "set family must be nonempty");
}

SetFamily SetFamily::power_set(std::size_t ground) {
    require(ground <= 20, "power set ground size capped at 20");
    std::vector<std::uint32_t> m(std::size_t(1) << ground);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<std::uint32_t>(i);
    return SetFamily(ground, std::move(m));
}

SetFamily SetFamily::intervals(std::size_t ground) {
    std::vector<std::uint32_t> m;
    m.push_back(0);  // empty set
    for (std::size_t lo = 0; lo < ground; ++lo) {
        std::uint32_t mask = 0;
        for (std::size_t hi = lo; hi < ground; ++hi) {
            mask |= (1u << hi);
            m.push_back(mask);
        }
    }
    return SetFamily(ground, std::move(m));
}

std::uint64_t log2_level_cardinality(int n) {
    require(n >= 0, "level index must be nonnegative");
    require(n <= 62, "level index too large for log2 cardinality");
    if (n == 0) return 0;
    return std::uint64_t(1) << n;
}

std::uint64_t level_cardinality_exact(int n) {
    require(n >= 0 && n <= kMaxExactLevel,
            "exact level cardinality available only through n=5 (N_5 = 2^32)");
    if (n == 0) return 1;
    return std::uint64_t(1) << (std::uint64_t(1) << n);
}

double level_cardinality_inverse(int n) {
    require(n >= 0, "level index must be nonnegative");
    if (n == 0) return 1.0;
    if (n > 62) return 0.0;
    return std::exp2(-static_cast<double>(std::uint64_t(1) << n));
}

bool within_level_cardinality(std::uint64_t count, int n) {
    require(n >= 0, "level index must be nonnegative");
    if (n <= kMaxExactLevel) return count <= level_cardinality_exact(n);
    // N_n >= 2^64 for n >= 6; any representable count fits
    return true;
}

BoundReport BoundReport::make(std::string quantity, double bound, double estimate,
                              double std_error, int tau, std::uint64_t seed,
                              std::uint64_t samples) {
    BoundReport r;
    r.quantity = std::move(quantity);
    r.bound = bound;
    r.estimate = estimate;
    r.std_error = std_error;
    r.ratio = bound > 0.0 ? estimate / bound : 0.0;
    r.tau = tau;
    r.seed = seed;
    r.samples = samples;
    return r;
}

}  // namespace chainkit
