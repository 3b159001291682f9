#include "chainkit/io.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace chainkit {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write file: " + path);
    out << content;
}

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::uint64_t config_hash(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

namespace {

json parse(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw UsageError("malformed json in " + what);
    return j;
}

PointSet point_set_from_json(const json& j) {
    if (!j.contains("points") || !j["points"].is_array() || j["points"].empty()) {
        throw UsageError("instance field 'points' missing or empty");
    }
    const bool complex_field = j.value("field", "real") == std::string("complex");
    std::vector<IndexedVector> pts;
    for (const auto& row : j["points"]) {
        std::vector<double> re, im;
        for (const auto& c : row) {
            if (complex_field) {
                if (!c.is_array() || c.size() != 2) {
                    throw UsageError("complex coordinates must be [re, im] pairs");
                }
                re.push_back(c[0].get<double>());
                im.push_back(c[1].get<double>());
            } else {
                re.push_back(c.get<double>());
            }
        }
        pts.push_back(complex_field ? IndexedVector(std::move(re), std::move(im))
                                    : IndexedVector(std::move(re)));
    }
    PointSet T(std::move(pts));
    if (j.contains("dim") && j["dim"].get<std::size_t>() != T.dim()) {
        throw UsageError("instance field 'dim' disagrees with the point rows");
    }
    return T;
}

json point_set_json(const PointSet& T) {
    json j;
    j["dim"] = T.dim();
    j["field"] = T.complex_field() ? "complex" : "real";
    json pts = json::array();
    for (const auto& p : T.points()) {
        json row = json::array();
        for (std::size_t i = 0; i < p.dim(); ++i) {
            if (T.complex_field()) {
                row.push_back(json::array({p.re(i), p.im(i)}));
            } else {
                row.push_back(p.re(i));
            }
        }
        pts.push_back(std::move(row));
    }
    j["points"] = std::move(pts);
    return j;
}

SetFamily set_family_from_json(const json& j) {
    if (!j.contains("ground_size") || !j.contains("members")) {
        throw UsageError("set family needs 'ground_size' and 'members'");
    }
    const std::size_t ground = j["ground_size"].get<std::size_t>();
    std::vector<std::uint32_t> masks;
    for (const auto& member : j["members"]) {
        std::uint32_t mask = 0;
        for (const auto& idx : member) {
            const std::size_t i = idx.get<std::size_t>();
            if (i >= ground) throw UsageError("set family member index outside ground set");
            mask |= (1u << i);
        }
        masks.push_back(mask);
    }
    return SetFamily(ground, std::move(masks));
}

CatalogFunction function_from_json(const json& j) {
    const std::string kind = j.value("kind", "affine");
    if (kind == "affine") {
        return CatalogFunction::affine(j.value("a", 0.0), j.value("b", 0.0));
    }
    if (kind == "clipped-affine") {
        return CatalogFunction::clipped(j.value("a", 0.0), j.value("b", 0.0), j.value("lo", -1.0),
                                        j.value("hi", 1.0));
    }
    if (kind == "step") {
        return CatalogFunction::step(j.value("height", 0.0), j.value("threshold", 0.0));
    }
    throw UsageError("unknown catalog function kind: " + kind);
}

Sampler sampler_from_json(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "uniform01") return Sampler::uniform01();
        if (s == "std-normal") return Sampler::std_normal();
        throw UsageError("unknown sampler: " + s);
    }
    if (j.is_object() && j.contains("values") && j.contains("weights")) {
        return Sampler::discrete(j["values"].get<std::vector<double>>(),
                                 j["weights"].get<std::vector<double>>());
    }
    throw UsageError("malformed sampler spec");
}

FunctionFamilySpec function_family_from_json(const json& j) {
    FunctionFamilySpec spec{FunctionFamily::bounded_sup_family(
                                {CatalogFunction::affine(0.0, 0.0)}, 0.0, 1.0),
                            Sampler::uniform01()};
    if (!j.contains("functions")) throw UsageError("function family needs 'functions'");
    std::vector<CatalogFunction> funcs;
    for (const auto& f : j["functions"]) funcs.push_back(function_from_json(f));
    spec.dom_lo = 0.0;
    spec.dom_hi = 1.0;
    if (j.contains("domain")) {
        spec.dom_lo = j["domain"][0].get<double>();
        spec.dom_hi = j["domain"][1].get<double>();
    }
    spec.family = FunctionFamily::bounded_sup_family(std::move(funcs), spec.dom_lo, spec.dom_hi);
    spec.sampler = j.contains("sampler") ? sampler_from_json(j["sampler"]) : Sampler::uniform01();
    return spec;
}

IndexedVector vector_from_json(const json& j) {
    return IndexedVector(j.get<std::vector<double>>());
}

}  // namespace

PointSet load_point_set(const std::string& path) {
    return point_set_from_json(parse(read_file(path), path));
}

std::string point_set_to_json(const PointSet& T) { return point_set_json(T).dump(2) + "\n"; }

void save_point_set(const PointSet& T, const std::string& path) {
    write_file(path, point_set_to_json(T));
}

SetFamily load_set_family(const std::string& path) {
    return set_family_from_json(parse(read_file(path), path));
}

std::string set_family_to_json(const SetFamily& fam) {
    json j;
    j["ground_size"] = fam.ground_size;
    json members = json::array();
    for (std::uint32_t mask : fam.members) {
        json member = json::array();
        for (std::size_t i = 0; i < fam.ground_size; ++i) {
            if (mask >> i & 1u) member.push_back(i);
        }
        members.push_back(std::move(member));
    }
    j["members"] = std::move(members);
    return j.dump(2) + "\n";
}

FunctionFamilySpec load_function_family(const std::string& path) {
    return function_family_from_json(parse(read_file(path), path));
}

Instance load_instance(const std::string& path) {
    const json j = parse(read_file(path), path);
    Instance inst;
    inst.type = j.value("type", "point-set");
    inst.id = j.value("id", path);
    if (j.contains("T")) inst.sets.push_back(point_set_from_json(j["T"]));
    if (j.contains("U")) {
        inst.sets.insert(inst.sets.begin(), point_set_from_json(j["U"]));
    }
    if (j.contains("points")) inst.sets.push_back(point_set_from_json(j));
    if (j.contains("family")) inst.families.push_back(set_family_from_json(j["family"]));
    if (j.contains("axes")) inst.vectors.push_back(vector_from_json(j["axes"]));
    if (j.contains("axes_y")) inst.vectors.push_back(vector_from_json(j["axes_y"]));
    if (j.contains("group_order")) inst.group_order = j["group_order"].get<int>();
    if (j.contains("freqs")) inst.freqs = j["freqs"].get<std::vector<int>>();
    if (j.contains("function_family")) {
        inst.function_families.push_back(function_family_from_json(j["function_family"]));
    }
    return inst;
}

std::string partition_tree_to_json(const PartitionTree& tree) {
    json levels = json::array();
    for (int n = 0; n <= tree.depth(); ++n) {
        json lvl;
        lvl["level"] = n;
        lvl["cells"] = tree.level(n).cells;
        lvl["representatives"] = tree.level(n).rep;
        if (n > 0) lvl["parents"] = tree.level(n).parent;
        levels.push_back(std::move(lvl));
    }
    json j;
    j["levels"] = std::move(levels);
    return j.dump(2) + "\n";
}

std::string partition_tree_summary_csv(const PartitionTree& tree, const DistanceMatrix& dist) {
    std::ostringstream out;
    out << "level,cell_count,max_diameter\n";
    for (int n = 0; n <= tree.depth(); ++n) {
        double diam = 0.0;
        for (const auto& cell : tree.level(n).cells) {
            diam = std::max(diam, dist.diameter_of(cell));
        }
        out << n << ',' << tree.level(n).cells.size() << ',' << format_double(diam) << '\n';
    }
    return out.str();
}

std::string cube_cover_to_json(const CubeCover& cover) {
    json j;
    j["N"] = cover.N;
    j["n"] = cover.n;
    j["sigma"] = cover.sigma;
    j["regime"] = cover.regime == CubeRegime::Low      ? "low"
                  : cover.regime == CubeRegime::Middle ? "middle"
                                                       : "high";
    j["side"] = cover.side;
    j["m_n"] = cover.m_n;
    j["explicit"] = cover.explicit_mode;
    j["log2_count"] = cover.log2_count;
    j["log2_certified_bound"] = cover.log2_certified_bound;
    j["l2_diameter"] = cover.l2_diameter;
    if (cover.explicit_mode && cover.cubes.size() <= 4096) {
        json cubes = json::array();
        for (const auto& c : cover.cubes) {
            cubes.push_back({{"center", c.center}, {"linf_radius", c.linf_radius}});
        }
        j["cubes"] = std::move(cubes);
    } else {
        j["cube_count_listed"] = 0;
    }
    return j.dump(2) + "\n";
}

ReportWriter::ReportWriter(std::string instance_id, std::uint64_t config_hash, bool deterministic)
    : instance_id_(std::move(instance_id)), config_hash_(config_hash),
      deterministic_(deterministic) {}

void ReportWriter::add(const BoundReport& report) {
    Row r;
    r.quantity = report.quantity;
    r.value = report.estimate;
    r.std_error = report.std_error;
    r.bound = report.bound;
    r.ratio = report.ratio;
    r.tau = report.tau;
    r.samples = report.samples;
    r.seed = report.seed;
    r.pass = report.pass;
    rows_.push_back(std::move(r));
}

void ReportWriter::add_value(const std::string& quantity, double value, double std_error,
                             std::uint64_t seed, std::uint64_t samples) {
    Row r;
    r.quantity = quantity;
    r.value = value;
    r.std_error = std_error;
    r.seed = seed;
    r.samples = samples;
    rows_.push_back(std::move(r));
}

void ReportWriter::add_sup(const std::string& quantity, const SupEstimate& est) {
    Row r;
    r.quantity = quantity + (est.exact ? "(exact)" : "");
    r.value = est.mean;
    r.std_error = est.std_error;
    r.samples = est.samples;
    r.seed = est.seed;
    rows_.push_back(std::move(r));
}

namespace {

std::string timestamp_line() {
    const auto now = std::chrono::system_clock::now();
    const auto t = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return std::string("# timestamp=") + buf + "\n";
}

}  // namespace

std::string ReportWriter::csv() const {
    std::ostringstream out;
    out << "# chainkit_version=" << kVersion << " config_hash=" << config_hash_ << "\n";
    if (!deterministic_) out << timestamp_line();
    out << "instance_id,quantity,value,stderr,bound,ratio,tau,samples,seed,pass\n";
    for (const auto& r : rows_) {
        out << instance_id_ << ',' << r.quantity << ',' << format_double(r.value) << ','
            << format_double(r.std_error) << ',' << format_double(r.bound) << ','
            << format_double(r.ratio) << ',' << r.tau << ',' << r.samples << ',' << r.seed << ','
            << (r.pass.has_value() ? (*r.pass ? "pass" : "FAIL") : "") << '\n';
    }
    return out.str();
}

std::string ReportWriter::text() const {
    std::ostringstream out;
    out << "chainkit " << kVersion << "  instance=" << instance_id_
        << "  config_hash=" << config_hash_ << "\n";
    for (const auto& r : rows_) {
        out << "  " << r.quantity << ": value=" << format_double(r.value);
        if (r.std_error > 0.0) out << " +- " << format_double(r.std_error);
        if (r.bound != 0.0) {
            out << "  bound=" << format_double(r.bound) << "  ratio=" << format_double(r.ratio);
        }
        if (r.pass.has_value()) out << (*r.pass ? "  PASS" : "  FAIL");
        out << "\n";
    }
    return out.str();
}

bool ReportWriter::all_passed() const {
    for (const auto& r : rows_) {
        if (r.pass.has_value() && !*r.pass) return false;
    }
    return true;
}

bool ReportWriter::any_fail() const { return !all_passed(); }

}  // namespace chainkit
