#include "chainkit/partition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>

namespace chainkit {

namespace {

constexpr std::size_t kExactCoverCap = 14;

std::vector<std::uint32_t> ball_masks(const DistanceMatrix& dist, double eps) {
    const std::size_t m = dist.size();
    std::vector<std::uint32_t> balls(m, 0);
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t p = 0; p < m; ++p) {
            if (dist.at(c, p) <= eps) balls[c] |= (1u << p);
        }
    }
    return balls;
}

}  // namespace

int covering_number_exact(const DistanceMatrix& dist, double eps) {
    const std::size_t m = dist.size();
    require(m <= kExactCoverCap,
            "exact covering capped at 14 points; use covering_greedy for larger sets");
    require(eps >= 0.0, "radius must be nonnegative");
    const auto balls = ball_masks(dist, eps);
    const std::uint32_t full = m == 32 ? ~0u : ((1u << m) - 1u);
    // dp over uncovered masks: expand on the lowest uncovered point
    std::vector<std::uint8_t> dp(std::size_t(full) + 1, 255);
    dp[0] = 0;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        const int low = std::countr_zero(mask);
        std::uint8_t best = 255;
        for (std::size_t c = 0; c < m; ++c) {
            if (!(balls[c] >> low & 1u)) continue;
            const std::uint8_t sub = dp[mask & ~balls[c]];
            if (sub != 255 && sub + 1 < best) best = static_cast<std::uint8_t>(sub + 1);
        }
        dp[mask] = best;
    }
    return dp[full];
}

CoverResult covering_exact(const DistanceMatrix& dist, double eps) {
    const std::size_t m = dist.size();
    require(m <= kExactCoverCap,
            "exact covering capped at 14 points; use covering_greedy for larger sets");
    const auto balls = ball_masks(dist, eps);
    const std::uint32_t full = m == 32 ? ~0u : ((1u << m) - 1u);
    std::vector<std::uint8_t> dp(std::size_t(full) + 1, 255);
    std::vector<std::int8_t> choice(std::size_t(full) + 1, -1);
    dp[0] = 0;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        const int low = std::countr_zero(mask);
        std::uint8_t best = 255;
        std::int8_t pick = -1;
        for (std::size_t c = 0; c < m; ++c) {
            if (!(balls[c] >> low & 1u)) continue;
            const std::uint8_t sub = dp[mask & ~balls[c]];
            if (sub != 255 && sub + 1 < best) {
                best = static_cast<std::uint8_t>(sub + 1);
                pick = static_cast<std::int8_t>(c);
            }
        }
        dp[mask] = best;
        choice[mask] = pick;
    }
    CoverResult out;
    out.radius = eps;
    out.exact = true;
    std::uint32_t mask = full;
    while (mask) {
        const int c = choice[mask];
        out.centers.push_back(c);
        mask &= ~balls[static_cast<std::size_t>(c)];
    }
    std::sort(out.centers.begin(), out.centers.end());
    out.assignment.assign(m, -1);
    for (std::size_t p = 0; p < m; ++p) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < out.centers.size(); ++k) {
            const double d = dist.at(out.centers[k], p);
            if (d < best && d <= eps) { best = d; out.assignment[p] = static_cast<int>(k); }
        }
    }
    return out;
}

CoverResult covering_greedy(const DistanceMatrix& dist, double eps) {
    require(eps >= 0.0, "radius must be nonnegative");
    const std::size_t m = dist.size();
    CoverResult out;
    out.radius = eps;
    out.exact = false;
    out.centers.push_back(0);
    std::vector<double> nearest(m);
    for (std::size_t p = 0; p < m; ++p) nearest[p] = dist.at(0, p);
    while (true) {
        std::size_t far = 0;
        for (std::size_t p = 1; p < m; ++p) {
            if (nearest[p] > nearest[far]) far = p;
        }
        if (nearest[far] <= eps) break;
        out.centers.push_back(static_cast<int>(far));
        for (std::size_t p = 0; p < m; ++p) nearest[p] = std::min(nearest[p], dist.at(far, p));
    }
    out.assignment.assign(m, 0);
    for (std::size_t p = 0; p < m; ++p) {
        double best = std::numeric_limits<double>::infinity();
        int pick = 0;
        for (std::size_t k = 0; k < out.centers.size(); ++k) {
            const double d = dist.at(out.centers[k], p);
            if (d < best) { best = d; pick = static_cast<int>(k); }
        }
        out.assignment[p] = pick;
    }
    return out;
}

CoverResult cover_within_budget(const DistanceMatrix& dist, double eps, int n) {
    if (dist.size() <= kExactCoverCap) {
        CoverResult c = covering_exact(dist, eps);
        if (within_level_cardinality(c.centers.size(), n)) return c;
        throw InternalError("exact cover exceeded the level budget at its entropy radius");
    }
    CoverResult c = covering_greedy(dist, eps);
    if (within_level_cardinality(c.centers.size(), n)) return c;
    throw InternalError("greedy cover exceeded the level budget at its entropy radius");
}

namespace {

std::size_t cover_size(const DistanceMatrix& dist, double eps) {
    if (dist.size() <= kExactCoverCap) {
        return static_cast<std::size_t>(covering_number_exact(dist, eps));
    }
    return covering_greedy(dist, eps).centers.size();
}

// smallest candidate radius whose cover size fits N_n
double entropy_number_for(const DistanceMatrix& dist, int n) {
    if (within_level_cardinality(dist.size(), n)) return 0.0;  // singleton balls
    const auto cand = dist.sorted_distinct_values();
    std::size_t lo = 0, hi = cand.size() - 1;  // cover at max radius has size 1
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (within_level_cardinality(cover_size(dist, cand[mid]), n)) hi = mid;
        else lo = mid + 1;
    }
    return cand[lo];
}

}  // namespace

std::vector<double> entropy_numbers_fixed(const DistanceMatrix& dist, int n_max) {
    require(n_max >= 0, "n_max must be nonnegative");
    std::vector<double> e(n_max + 1, 0.0);
    for (int n = 0; n <= n_max; ++n) e[n] = entropy_number_for(dist, n);
    return e;
}

std::vector<double> entropy_numbers(const DistanceFamily& fam, int tau, int n_max) {
    require(tau >= 0, "tau must be nonnegative");
    require(n_max >= 0, "n_max must be nonnegative");
    require(n_max + tau <= fam.n_max(),
            "distance family not materialized deep enough for requested entropy levels");
    std::vector<double> e(n_max + 1, 0.0);
    for (int n = 0; n <= n_max; ++n) e[n] = entropy_number_for(fam.level(n + tau), n);
    return e;
}

void PartitionTree::push_level(PartitionLevel lvl) {
    std::vector<int> member(n_points_, -1);
    for (std::size_t c = 0; c < lvl.cells.size(); ++c) {
        for (int p : lvl.cells[c]) member[static_cast<std::size_t>(p)] = static_cast<int>(c);
    }
    for (std::size_t p = 0; p < n_points_; ++p) {
        if (member[p] < 0) throw InternalError("partition level does not cover all points");
    }
    levels_.push_back(std::move(lvl));
    membership_.push_back(std::move(member));
}

bool PartitionTree::top_is_scattered() const {
    if (levels_.empty()) return false;
    for (const auto& cell : levels_.back().cells) {
        if (cell.size() > 1) return false;
    }
    return true;
}

void PartitionTree::validate() const {
    for (std::size_t n = 0; n < levels_.size(); ++n) {
        const auto& lvl = levels_[n];
        if (n <= kMaxExactLevel &&
            !within_level_cardinality(lvl.cells.size(), static_cast<int>(n))) {
            throw InternalError("partition level exceeds the N_n cardinality cap");
        }
        for (std::size_t c = 0; c < lvl.cells.size(); ++c) {
            const auto& cell = lvl.cells[c];
            if (cell.empty()) throw InternalError("empty partition cell");
            const int rep = lvl.rep[c];
            if (std::find(cell.begin(), cell.end(), rep) == cell.end()) {
                throw InternalError("representative outside its cell");
            }
            if (n == 0) continue;
            const int parent = lvl.parent[c];
            const auto& up = levels_[n - 1].cells[static_cast<std::size_t>(parent)];
            for (int p : cell) {
                if (std::find(up.begin(), up.end(), p) == up.end()) {
                    throw InternalError("partition nestedness violated");
                }
            }
            // hereditary representatives
            const int parent_rep = levels_[n - 1].rep[static_cast<std::size_t>(parent)];
            if (std::find(cell.begin(), cell.end(), parent_rep) != cell.end() &&
                rep != parent_rep) {
                throw InternalError("hereditary representative rule violated");
            }
        }
    }
}

namespace {

PartitionLevel root_level(std::size_t m) {
    PartitionLevel lvl;
    lvl.cells.emplace_back();
    for (std::size_t p = 0; p < m; ++p) lvl.cells[0].push_back(static_cast<int>(p));
    lvl.parent = {-1};
    lvl.rep = {0};
    return lvl;
}

// Refine `prev` by a global cover assignment; hereditary reps, lowest index
// breaking ties, cells ordered by (parent, first point).
PartitionLevel refine_by_assignment(const PartitionLevel& prev,
                                    const std::vector<int>& assignment) {
    PartitionLevel next;
    for (std::size_t pc = 0; pc < prev.cells.size(); ++pc) {
        const auto& cell = prev.cells[pc];
        std::vector<std::pair<int, std::vector<int>>> groups;  // assignment class -> points
        for (int p : cell) {
            const int a = assignment[static_cast<std::size_t>(p)];
            auto it = std::find_if(groups.begin(), groups.end(),
                                   [&](const auto& g) { return g.first == a; });
            if (it == groups.end()) groups.push_back({a, {p}});
            else it->second.push_back(p);
        }
        for (auto& g : groups) {
            std::sort(g.second.begin(), g.second.end());
            const int parent_rep = prev.rep[pc];
            int rep = g.second.front();
            if (std::find(g.second.begin(), g.second.end(), parent_rep) != g.second.end()) {
                rep = parent_rep;
            }
            next.parent.push_back(static_cast<int>(pc));
            next.rep.push_back(rep);
            next.cells.push_back(std::move(g.second));
        }
    }
    return next;
}

PartitionTree build_tree(std::size_t m,
                         const std::function<const DistanceMatrix&(int)>& metric_at,
                         const std::function<double(int)>& radius_at, int budget_level_offset) {
    PartitionTree tree(m);
    tree.push_level(root_level(m));
    // level n+1 refines level n by the global cover at level n
    for (int n = 0;; ++n) {
        const auto& prev = tree.level(n);
        bool scattered = true;
        for (std::size_t c = 0; c < prev.cells.size() && scattered; ++c) {
            if (prev.cells[c].size() > 1 &&
                metric_at(n).diameter_of(prev.cells[c]) > 0.0) {
                scattered = false;
            }
        }
        if (scattered && n > 0) break;
        const double eps = radius_at(n);
        CoverResult cover = cover_within_budget(metric_at(n), eps, n + budget_level_offset);
        PartitionLevel next = refine_by_assignment(prev, cover.assignment);
        const bool progressed = next.cells.size() > prev.cells.size();
        tree.push_level(std::move(next));
        if (!progressed && eps <= 0.0) break;  // zero-diameter groups cannot split further
        if (n > 64) throw InternalError("partition refinement failed to terminate");
    }
    tree.validate();
    return tree;
}

}  // namespace

PartitionTree partition_from_entropy(const DistanceFamily& fam, int tau) {
    // refinement scatters once some N_n reaches |T|; covers run one level past
    int needed = 0;
    while (!within_level_cardinality(fam.base().size(), needed)) ++needed;
    require(fam.n_max() >= tau + needed + 1,
            "family too shallow for requested tau; materialize more levels");
    const auto e = entropy_numbers(fam, tau, fam.n_max() - tau);
    return build_tree(
        fam.base().size(),
        [&fam, tau](int n) -> const DistanceMatrix& { return fam.level(n + tau); },
        [&e](int n) { return e.at(static_cast<std::size_t>(n)); }, 0);
}

PartitionTree partition_from_entropy_fixed(const PointSet& T, const DistanceMatrix& dist) {
    const auto e = entropy_numbers_fixed(dist, 32);
    return build_tree(
        T.size(), [&dist](int) -> const DistanceMatrix& { return dist; },
        [&e](int n) { return e[static_cast<std::size_t>(n)]; }, 0);
}

double entropy_tree_certificate_defect(const PartitionTree& tree, const DistanceFamily& fam,
                                       int tau, std::span<const double> entropy) {
    double defect = -std::numeric_limits<double>::infinity();
    for (int n = 1; n <= tree.depth(); ++n) {
        if (static_cast<std::size_t>(n - 1) >= entropy.size()) break;
        const DistanceMatrix& metric = fam.level(n + tau - 1);
        for (const auto& cell : tree.level(n).cells) {
            defect = std::max(defect, metric.diameter_of(cell) - 2.0 * entropy[n - 1]);
        }
    }
    return defect;
}

double gamma_functional(const PartitionTree& tree, const DistanceFamily& fam, int tau) {
    require(tau >= 0, "tau must be nonnegative");
    require(tree.depth() + tau <= fam.n_max(),
            "gamma functional level range exceeds the materialized family");
    if (!tree.top_is_scattered()) {
        // truncation is exact only when deepest cells have zero diameter
        for (const auto& cell : tree.level(tree.depth()).cells) {
            if (fam.level(tree.depth() + tau).diameter_of(cell) > 0.0) {
                throw UsageError("partition tree does not resolve the set; deepen the family");
            }
        }
    }
    double sup = 0.0;
    const std::size_t m = tree.n_points();
    for (std::size_t p = 0; p < m; ++p) {
        double sum = 0.0;
        for (int n = 0; n <= tree.depth(); ++n) {
            const int c = tree.cell_of(n, static_cast<int>(p));
            sum += fam.level(n + tau).diameter_of(tree.level(n).cells[static_cast<std::size_t>(c)]);
        }
        sup = std::max(sup, sum);
    }
    return sup;
}

double gamma_weighted(const PartitionTree& tree, const DistanceMatrix& dist, double exponent) {
    double sup = 0.0;
    for (std::size_t p = 0; p < tree.n_points(); ++p) {
        double sum = 0.0;
        for (int n = 0; n <= tree.depth(); ++n) {
            const int c = tree.cell_of(n, static_cast<int>(p));
            sum += std::exp2(exponent * n) *
                   dist.diameter_of(tree.level(n).cells[static_cast<std::size_t>(c)]);
        }
        sup = std::max(sup, sum);
    }
    return sup;
}

namespace {

PartitionTree rebuild_from_membership(std::size_t m,
                                      const std::vector<std::vector<int>>& membership) {
    PartitionTree tree(m);
    tree.push_level(root_level(m));
    for (std::size_t n = 1; n < membership.size(); ++n) {
        tree.push_level(refine_by_assignment(tree.level(static_cast<int>(n - 1)), membership[n]));
    }
    tree.validate();
    return tree;
}

}  // namespace

PartitionTree local_improve(const PartitionTree& tree, const DistanceFamily& fam, int tau) {
    const std::size_t m = tree.n_points();
    std::vector<std::vector<int>> membership(static_cast<std::size_t>(tree.depth()) + 1,
                                             std::vector<int>(m));
    for (int n = 0; n <= tree.depth(); ++n) {
        for (std::size_t p = 0; p < m; ++p) {
            membership[static_cast<std::size_t>(n)][p] = tree.cell_of(n, static_cast<int>(p));
        }
    }
    PartitionTree best = tree;
    double best_value = gamma_functional(best, fam, tau);
    for (int n = 1; n <= tree.depth(); ++n) {
        for (std::size_t p = 0; p < m; ++p) {
            const int own = best.cell_of(n, static_cast<int>(p));
            const int parent = best.level(n).parent[static_cast<std::size_t>(own)];
            for (std::size_t c = 0; c < best.level(n).cells.size(); ++c) {
                if (static_cast<int>(c) == own) continue;
                if (best.level(n).parent[c] != parent) continue;  // siblings only
                if (best.level(n).cells[own].size() <= 1) continue;
                // p follows the representative chain of the target cell below n
                auto trial = membership;
                const int target_rep = best.level(n).rep[c];
                for (int k = n; k <= best.depth(); ++k) {
                    trial[static_cast<std::size_t>(k)][p] =
                        best.cell_of(k, target_rep);
                }
                PartitionTree candidate = rebuild_from_membership(m, trial);
                const double value = gamma_functional(candidate, fam, tau);
                if (value < best_value - 1e-15) {
                    best_value = value;
                    best = std::move(candidate);
                    membership = std::move(trial);
                    for (int k = 0; k <= best.depth(); ++k) {
                        for (std::size_t q = 0; q < m; ++q) {
                            membership[static_cast<std::size_t>(k)][q] =
                                best.cell_of(k, static_cast<int>(q));
                        }
                    }
                    break;
                }
            }
        }
    }
    return best;
}

Gamma2Result gamma2_upper_with_tree(const PointSet& T) {
    const DistanceMatrix d = canonical_distance(T);
    Gamma2Result out;
    out.tree = partition_from_entropy_fixed(T, d);
    out.value = gamma_weighted(out.tree, d, 0.5);
    return out;
}

double gamma2_upper(const PointSet& T) { return gamma2_upper_with_tree(T).value; }

DudleyResult dudley_sum(const PointSet& T) {
    const DistanceMatrix d = canonical_distance(T);
    DudleyResult out;
    out.entropy = entropy_numbers_fixed(d, 32);
    for (std::size_t n = 0; n < out.entropy.size(); ++n) {
        out.sum += std::exp2(0.5 * static_cast<double>(n)) * out.entropy[n];
    }
    // N(T,d,eps) is piecewise constant between consecutive pairwise distances,
    // so the Dudley integral is a finite exact sum.
    const auto cand = d.sorted_distinct_values();
    for (std::size_t k = 0; k + 1 < cand.size(); ++k) {
        const std::size_t count = [&] {
            if (d.size() <= 14) return static_cast<std::size_t>(covering_number_exact(d, cand[k]));
            return covering_greedy(d, cand[k]).centers.size();
        }();
        if (count > 1) {
            out.integral += (cand[k + 1] - cand[k]) * std::sqrt(std::log(static_cast<double>(count)));
        }
    }
    return out;
}

PartitionTree combined_partition(const PartitionTree& t1, const PartitionTree& t2) {
    require_structure(t1.n_points() == t2.n_points(), "partition trees over different sets");
    const std::size_t m = t1.n_points();
    PartitionTree tree(m);
    tree.push_level(root_level(m));
    const int depth = std::max(t1.depth(), t2.depth());
    for (int n = 1; n <= depth + 1; ++n) {
        const int k = n - 1;
        std::vector<int> assignment(m);
        const int k1 = std::min(k, t1.depth());
        const int k2 = std::min(k, t2.depth());
        const int width2 = static_cast<int>(t2.level(k2).cells.size());
        for (std::size_t p = 0; p < m; ++p) {
            assignment[p] = t1.cell_of(k1, static_cast<int>(p)) * width2 +
                            t2.cell_of(k2, static_cast<int>(p));
        }
        tree.push_level(refine_by_assignment(tree.level(n - 1), assignment));
    }
    tree.validate();
    return tree;
}

CombinedPartitionResult combined_partition_build(const PointSet& F, const DistanceMatrix& d1,
                                                 const DistanceMatrix& d2) {
    require_structure(d1.size() == F.size() && d2.size() == F.size(),
                      "metric size mismatch with the point set");
    CombinedPartitionResult out;
    out.dedicated1 = partition_from_entropy_fixed(F, d1);
    out.dedicated2 = partition_from_entropy_fixed(F, d2);
    out.tree = combined_partition(out.dedicated1, out.dedicated2);
    out.dedicated_gamma1 = gamma_weighted(out.dedicated1, d1, 1.0);
    out.dedicated_gamma2 = gamma_weighted(out.dedicated2, d2, 0.5);
    out.combined_gamma1 = gamma_weighted(out.tree, d1, 1.0);
    out.combined_gamma2 = gamma_weighted(out.tree, d2, 0.5);
    return out;
}

}  // namespace chainkit
