#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Core domain types: indexed vectors over a finite index set, point sets,
// set families, the N_n level-cardinality schedule and bound reports.

namespace chainkit {

using Complex = std::complex<double>;

// Bad caller input: violated preconditions, exceeded caps, malformed flags.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed data: dimension mismatches, non-finite entries, broken files.
class StructuralError : public std::runtime_error {
public:
    explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

// A certificate that should hold by construction failed. Never expected.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

// A point t = (t_i), i in I, |I| = dim. Real vectors keep an empty imaginary
// part; complex scalars are stored as (re, im) pairs and moduli feed all norms.
class IndexedVector {
public:
    IndexedVector() = default;
    explicit IndexedVector(std::vector<double> re);
    IndexedVector(std::vector<double> re, std::vector<double> im);

    static IndexedVector zero(std::size_t dim, bool complex_field = false);
    static IndexedVector unit(std::size_t dim, std::size_t axis, double scale = 1.0);

    std::size_t dim() const { return re_.size(); }
    bool is_complex() const { return !im_.empty(); }

    double re(std::size_t i) const { return re_[i]; }
    double im(std::size_t i) const { return im_.empty() ? 0.0 : im_[i]; }
    Complex coord(std::size_t i) const { return {re(i), im(i)}; }
    double abs_coord(std::size_t i) const;

    double norm1() const;
    double norm2() const;
    double norm_inf() const;
    bool is_zero() const;

    bool operator==(const IndexedVector& o) const;

private:
    std::vector<double> re_;
    std::vector<double> im_;
};

IndexedVector operator-(const IndexedVector& a, const IndexedVector& b);
IndexedVector operator+(const IndexedVector& a, const IndexedVector& b);

// Finite T (or U) with consistent dimension and scalar field. Construction
// drops exact duplicates; deduplication is idempotent.
class PointSet {
public:
    explicit PointSet(std::vector<IndexedVector> points);

    std::size_t size() const { return points_.size(); }
    std::size_t dim() const { return dim_; }
    bool complex_field() const { return complex_; }
    bool contains_origin() const { return contains_origin_; }
    const IndexedVector& point(std::size_t i) const { return points_[i]; }
    const std::vector<IndexedVector>& points() const { return points_; }

    double max_norm1() const;
    double max_norm2() const;
    double max_norm_inf() const;

private:
    std::vector<IndexedVector> points_;
    std::size_t dim_ = 0;
    bool complex_ = false;
    bool contains_origin_ = false;
};

// A class of subsets of {0..ground_size-1}, bit-vector encoded.
struct SetFamily {
    std::size_t ground_size = 0;
    std::vector<std::uint32_t> members;

    SetFamily() = default;
    SetFamily(std::size_t ground, std::vector<std::uint32_t> member_masks);

    static SetFamily power_set(std::size_t ground);
    static SetFamily intervals(std::size_t ground);  // contiguous runs incl. empty set

    std::size_t size() const { return members.size(); }
};

// Level schedule: N_0 = 1, N_n = 2^(2^n) for n >= 1, so N_n^2 = N_{n+1} and
// N_0 N_1 / N_2 = 1/4. Exact integers through n = 5 (N_5 = 2^32), log2 domain
// beyond; cardinalities only enter comparisons above that.
inline constexpr int kMaxExactLevel = 5;

std::uint64_t log2_level_cardinality(int n);              // log2 N_n
std::uint64_t level_cardinality_exact(int n);             // N_n, n <= 5 only
double level_cardinality_inverse(int n);                  // 1/N_n (0 beyond double range)
bool within_level_cardinality(std::uint64_t count, int n); // count <= N_n

struct LevelSchedule {
    int n_max = 0;
    explicit LevelSchedule(int n_max_) : n_max(n_max_) {}
    std::uint64_t log2_value(int n) const { return log2_level_cardinality(n); }
};

// One evaluated inequality: the assembled bound, the paired Monte Carlo or
// exact estimate, and provenance needed to reproduce the run.
struct BoundReport {
    std::string quantity;
    double bound = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    double ratio = 0.0;  // estimate / bound when bound > 0
    int tau = 0;
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    std::optional<bool> pass;

    static BoundReport make(std::string quantity, double bound, double estimate,
                            double std_error, int tau, std::uint64_t seed,
                            std::uint64_t samples);
};

void require(bool cond, const std::string& message);           // UsageError
void require_structure(bool cond, const std::string& message); // StructuralError

}  // namespace chainkit
