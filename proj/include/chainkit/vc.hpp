#pragma once

#include <optional>
#include <span>
#include <vector>

#include "chainkit/core.hpp"
#include "chainkit/mc.hpp"

// VC dimension of set families, epsilon-shattering dimension of point classes
// with margin witnesses, the shattering integral, and the maximal-inequality
// ratio experiment.

namespace chainkit {

// Largest |B| <= cap with all 2^|B| traces {B cap A : A in fam} realized.
int vc_dimension(const SetFamily& fam, int cap);

struct ShatterWitness {
    std::vector<int> J;                  // shattered coordinates
    std::vector<double> v;               // level function on J
    std::vector<int> witness_per_label;  // label mask (bit i of J low) -> index in U
};

// Largest |J| <= cap such that some level v on J admits, for every A subseteq J,
// a witness u with u_i <= v_i (i in A) and u_i >= v_i + eps (i in J \ A).
// Candidate levels reduce to coordinate values of U; feasibility for a fixed v
// is the surjectivity of u -> label(u) onto all 2^|J| labels.
int shattering_dimension(const PointSet& U, double eps, int cap,
                         ShatterWitness* witness = nullptr);

// Upper sum of int_0^1 sqrt(vc(U,eps) log(2/eps)) d eps on a sorted grid in
// (0,1]: vc is nonincreasing and piecewise constant, and the log factor
// integrates in closed form on each cell.
double shattering_integral(const PointSet& U, std::span<const double> eps_grid, int cap);

// K_emp = E sup_{A in fam} sup_t |sum_{i in A} t_i eps_i| / E sup_t |sum_i t_i eps_i|,
// reported against sqrt(vc_dimension(fam)).
BoundReport maximal_inequality_experiment(const SetFamily& fam, const PointSet& T,
                                          std::uint64_t samples, std::uint64_t seed,
                                          EnumerationPolicy policy = EnumerationPolicy::Auto,
                                          int vc_cap = 12);

// Grid discretization of the unit ball containing every sign-normalized
// support vector (the extremal shattering witnesses), plus scaled shells.
PointSet unit_ball_grid(int dim);

}  // namespace chainkit
