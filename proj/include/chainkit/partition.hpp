#pragma once

#include <span>
#include <vector>

#include "chainkit/metrics.hpp"

// Covering constructions, entropy numbers e^tau_n, admissible partition trees
// built by intersecting level covers, and the chaining functionals evaluated
// over a constructed tree (certified upper bounds on the infima).

namespace chainkit {

struct CoverResult {
    double radius = 0.0;
    std::vector<int> centers;     // point indices of centers
    std::vector<int> assignment;  // point index -> position in `centers`
    bool exact = false;
};

// Minimal number of closed balls with centers in T covering T. |T| <= 14.
int covering_number_exact(const DistanceMatrix& dist, double eps);
CoverResult covering_exact(const DistanceMatrix& dist, double eps);

// Farthest-point cover: centers pairwise > eps apart, deterministic
// (first point seeds, ties to the lowest index).
CoverResult covering_greedy(const DistanceMatrix& dist, double eps);

// Valid cover of size <= N_n at the returned radius, exact when |T| <= 14.
CoverResult cover_within_budget(const DistanceMatrix& dist, double eps, int n);

// e_n = inf{eps : N(T, dist, eps) <= N_n} for a fixed metric.
std::vector<double> entropy_numbers_fixed(const DistanceMatrix& dist, int n_max);
// e^tau_n = inf{eps : N(T, q_{n+tau}, eps) <= N_n}. Needs fam.n_max >= n_max + tau.
std::vector<double> entropy_numbers(const DistanceFamily& fam, int tau, int n_max);

struct PartitionLevel {
    std::vector<std::vector<int>> cells;
    std::vector<int> parent;  // index of the containing cell one level up
    std::vector<int> rep;     // hereditary representative point index per cell
};

class PartitionTree {
public:
    PartitionTree() = default;
    explicit PartitionTree(std::size_t n_points) : n_points_(n_points) {}

    std::size_t n_points() const { return n_points_; }
    int depth() const { return static_cast<int>(levels_.size()) - 1; }
    const PartitionLevel& level(int n) const { return levels_[static_cast<std::size_t>(n)]; }
    int cell_of(int n, int point) const { return membership_[static_cast<std::size_t>(n)][point]; }
    bool top_is_scattered() const;  // deepest cells are singletons or 0-diameter groups

    void push_level(PartitionLevel lvl);
    void validate() const;  // nestedness, cardinality caps, hereditary reps

private:
    std::size_t n_points_ = 0;
    std::vector<PartitionLevel> levels_;
    std::vector<std::vector<int>> membership_;  // level -> point -> cell index
};

// Nested admissible tree from entropy covers: the level-n partition intersects
// the global covers built at levels 0..n-1, so every level-n cell sits inside
// a ball of the level-(n-1) cover and |A_n| <= N_0 N_1 ... N_{n-1} <= N_n.
PartitionTree partition_from_entropy(const DistanceFamily& fam, int tau);
PartitionTree partition_from_entropy_fixed(const PointSet& T, const DistanceMatrix& dist);

// Certificate recomputation: max over level-n cells of
// Delta_{n+tau-1}(A) - 2 e^tau_{n-1}, n >= 1. Nonpositive up to rounding.
double entropy_tree_certificate_defect(const PartitionTree& tree, const DistanceFamily& fam,
                                       int tau, std::span<const double> entropy);

// sup_t sum_n Delta_{n+tau}(A_n(t)) for THIS tree; levels past the tree are
// singleton cells and contribute zero.
double gamma_functional(const PartitionTree& tree, const DistanceFamily& fam, int tau);

// sup_t sum_n 2^{n * exponent} Delta_dist(A_n(t)); exponent 1/2 for gamma_2,
// 1 for gamma_1.
double gamma_weighted(const PartitionTree& tree, const DistanceMatrix& dist, double exponent);

// One local-improvement pass: move a point to a sibling cell chain when the
// functional strictly decreases. Keeps nestedness and cardinality caps.
PartitionTree local_improve(const PartitionTree& tree, const DistanceFamily& fam, int tau);

struct Gamma2Result {
    double value = 0.0;
    PartitionTree tree;
};
Gamma2Result gamma2_upper_with_tree(const PointSet& T);
double gamma2_upper(const PointSet& T);

struct DudleyResult {
    double sum = 0.0;                // sum_n 2^{n/2} e_n
    double integral = 0.0;           // int_0^inf sqrt(log N(T,d,eps)) d eps
    std::vector<double> entropy;     // e_n on the unscaled canonical metric
};
DudleyResult dudley_sum(const PointSet& T);

// Shifted intersection A_n = A^1_{n-1} cap A^2_{n-1} (n >= 1), A_0 = {F}.
PartitionTree combined_partition(const PartitionTree& t1, const PartitionTree& t2);

struct CombinedPartitionResult {
    PartitionTree tree;
    PartitionTree dedicated1, dedicated2;
    double combined_gamma1 = 0.0, combined_gamma2 = 0.0;    // over the shared tree
    double dedicated_gamma1 = 0.0, dedicated_gamma2 = 0.0;  // over each own tree
};
// Builds both dedicated entropy trees for (d1, d2) and their shifted
// intersection; gamma_i values use weight 2^{n/i} and metric d_i.
CombinedPartitionResult combined_partition_build(const PointSet& F, const DistanceMatrix& d1,
                                                 const DistanceMatrix& d2);

}  // namespace chainkit
