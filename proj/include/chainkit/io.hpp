#pragma once

#include <string>
#include <vector>

#include "chainkit/cover.hpp"
#include "chainkit/empirical.hpp"
#include "chainkit/mc.hpp"
#include "chainkit/partition.hpp"

// Structured-text (JSON) instance formats and the fixed-column CSV report
// layout shared by all CLI subcommands.

namespace chainkit {

// {"dim": d, "field": "real"|"complex", "points": [[..], ..]}
// complex points carry [re, im] pairs per coordinate
PointSet load_point_set(const std::string& path);
std::string point_set_to_json(const PointSet& T);
void save_point_set(const PointSet& T, const std::string& path);

// {"ground_size": d, "members": [[indices], ..]}
SetFamily load_set_family(const std::string& path);
std::string set_family_to_json(const SetFamily& fam);

// {"functions": [{"kind": "affine"|"clipped-affine"|"step", ...}],
//  "domain": [lo, hi], "sampler": "uniform01"|"std-normal"|{"values":..,"weights":..}}
struct FunctionFamilySpec {
    FunctionFamily family;
    Sampler sampler;
    double dom_lo = 0.0, dom_hi = 1.0;
};
FunctionFamilySpec load_function_family(const std::string& path);

// generic instance file: holds any of the payloads above plus ellipsoid axes
// and character data, keyed by "type"
struct Instance {
    std::string type;  // point-set | product | set-family | ellipsoid | character | function-family
    std::string id;
    std::vector<PointSet> sets;          // [T] or [U, T]
    std::vector<SetFamily> families;
    std::vector<IndexedVector> vectors;  // ellipsoid axes etc.
    int group_order = 1;
    std::vector<int> freqs;
    std::vector<FunctionFamilySpec> function_families;
};
Instance load_instance(const std::string& path);

std::string partition_tree_to_json(const PartitionTree& tree);
std::string partition_tree_summary_csv(const PartitionTree& tree, const DistanceMatrix& dist);
std::string cube_cover_to_json(const CubeCover& cover);

// fixed report layout: instance_id, quantity, value, stderr, bound, ratio,
// tau, samples, seed, pass
class ReportWriter {
public:
    ReportWriter(std::string instance_id, std::uint64_t config_hash, bool deterministic);

    void add(const BoundReport& report);
    void add_value(const std::string& quantity, double value, double std_error = 0.0,
                   std::uint64_t seed = 0, std::uint64_t samples = 0);
    void add_sup(const std::string& quantity, const SupEstimate& est);

    std::string csv() const;
    std::string text() const;
    bool all_passed() const;
    bool any_fail() const;

private:
    struct Row {
        std::string quantity;
        double value = 0.0, std_error = 0.0, bound = 0.0, ratio = 0.0;
        int tau = 0;
        std::uint64_t samples = 0, seed = 0;
        std::optional<bool> pass;
    };
    std::string instance_id_;
    std::uint64_t config_hash_;
    bool deterministic_;
    std::vector<Row> rows_;
};

std::string format_double(double v);                 // shortest round-trip
std::uint64_t config_hash(const std::string& text);  // FNV-1a
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace chainkit
