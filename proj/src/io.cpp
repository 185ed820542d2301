#include "skewsim/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ostream>

#include <json.hpp>

namespace skewsim {

namespace {

using nlohmann::json;

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = char((v >> (8 * i)) & 0xff);
    os.write(b, 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = char((v >> (8 * i)) & 0xff);
    os.write(b, 8);
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(os, bits);
}

std::vector<std::size_t> kept_slots(const PathEnsemble& ens, std::size_t downsample) {
    if (downsample == 0) downsample = 1;
    std::vector<std::size_t> slots;
    for (std::size_t s = 0; s < ens.n_stored(); s += downsample) slots.push_back(s);
    if (slots.back() != ens.n_stored() - 1) slots.push_back(ens.n_stored() - 1);
    return slots;
}

} // namespace

void write_trajectory_csv(const PathEnsemble& ens, std::ostream& os, std::size_t downsample) {
    os << "path,time";
    if (ens.dim == 1) {
        os << ",r";
    } else {
        for (int j = 0; j < ens.dim; ++j) os << ",x" << j;
    }
    os << "\n";
    const auto slots = kept_slots(ens, downsample);
    for (std::size_t p = 0; p < ens.n_paths; ++p)
        for (const std::size_t s : slots) {
            os << p << ',' << g17(ens.times[s]);
            for (int j = 0; j < ens.dim; ++j) os << ',' << g17(ens.position(p, s, j));
            os << '\n';
        }
}

void write_local_time_csv(const PathEnsemble& ens, std::ostream& os, std::size_t downsample) {
    os << "path,time,level,local_time\n";
    const auto slots = kept_slots(ens, downsample);
    for (std::size_t p = 0; p < ens.n_paths; ++p)
        for (std::size_t i = 0; i < ens.tracked_radii.size(); ++i)
            for (const std::size_t s : slots)
                os << p << ',' << g17(ens.times[s]) << ',' << g17(ens.tracked_radii[i]) << ','
                   << g17(ens.local_time_value(p, s, i)) << '\n';
}

void write_trajectory_binary(const PathEnsemble& ens, std::ostream& os) {
    os.write("SKSM", 4);
    put_u32(os, 1u);
    put_u32(os, std::uint32_t(ens.dim));
    put_u64(os, ens.n_paths);
    put_u64(os, ens.n_stored());
    for (const double t : ens.times) put_f64(os, t);
    for (const double v : ens.positions) put_f64(os, v);
}

void write_trajectory_json(const PathEnsemble& ens, std::ostream& os) {
    json j;
    j["dim"] = ens.dim;
    j["n_paths"] = ens.n_paths;
    j["times"] = ens.times;
    json paths = json::array();
    for (std::size_t p = 0; p < ens.n_paths; ++p) {
        json rows = json::array();
        for (std::size_t s = 0; s < ens.n_stored(); ++s) {
            json pt = json::array();
            for (int k = 0; k < ens.dim; ++k) pt.push_back(ens.position(p, s, k));
            rows.push_back(std::move(pt));
        }
        paths.push_back(std::move(rows));
    }
    j["positions"] = std::move(paths);
    os << j.dump() << '\n';
}

namespace {

json report_json(const TestReport& r) {
    json j;
    j["name"] = r.name;
    j["estimate"] = r.estimate;
    j["target"] = r.target;
    j["stderr"] = r.stderr_;
    if (r.p_value >= 0.0) j["p_value"] = r.p_value;
    j["tolerance_k"] = r.tolerance_k;
    j["p_threshold"] = r.p_threshold;
    if (r.rel_tolerance > 0.0) j["rel_tolerance"] = r.rel_tolerance;
    j["n"] = r.n;
    j["pass"] = r.pass;
    j["config"] = json::parse(r.config_echo.empty() ? "{}" : r.config_echo);
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

} // namespace

std::string to_json_line(const TestReport& report) { return report_json(report).dump(); }

void write_report_table(const std::vector<TestReport>& reports, std::ostream& os) {
    char line[160];
    std::snprintf(line, sizeof line, "%-24s %12s %12s %10s %8s %6s\n", "test", "estimate",
                  "target", "stderr", "p", "pass");
    os << line;
    for (const auto& r : reports) {
        char pbuf[16];
        if (r.p_value >= 0.0)
            std::snprintf(pbuf, sizeof pbuf, "%.3g", r.p_value);
        else
            std::snprintf(pbuf, sizeof pbuf, "-");
        std::snprintf(line, sizeof line, "%-24s %12.6g %12.6g %10.3g %8s %6s\n", r.name.c_str(),
                      r.estimate, r.target, r.stderr_, pbuf, r.pass ? "PASS" : "FAIL");
        os << line;
    }
}

std::string to_json(const IbpReport& r) {
    json j;
    j["lhs"] = r.lhs;
    j["volume_term"] = r.volume_term;
    j["surface_term"] = r.surface_term;
    j["residual_abs"] = r.residual_abs;
    j["residual_rel"] = r.residual_rel;
    j["error_budget"] = r.error_budget;
    return j.dump();
}

std::string to_json(const TraceReport& r) {
    json j;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["constant"] = r.constant;
    j["delta"] = r.delta;
    j["pass"] = r.pass;
    return j.dump();
}

std::string to_json(const GrowthReport& r) {
    json j;
    j["r_grid"] = r.r_grid;
    j["volumes"] = r.volumes;
    j["alpha_full"] = r.alpha_full;
    j["alpha_tail"] = r.alpha_tail;
    j["conservative"] = r.conservative;
    j["recurrent"] = r.recurrent;
    return j.dump();
}

std::string to_json(const A2Report& r) {
    json j;
    j["sup_ratio"] = r.sup_ratio;
    j["worst_ball"] = r.worst_ball;
    j["per_ball"] = r.per_ball;
    j["converged"] = r.converged;
    j["refinement_growth"] = r.refinement_growth;
    return j.dump();
}

std::string to_json(const RunManifest& m) {
    json j;
    j["subcommand"] = m.subcommand;
    j["seed"] = m.seed;
    j["config_hash"] = m.config_hash;
    j["outputs"] = m.outputs;
    j["wall_seconds"] = m.wall_seconds;
    j["version"] = m.version;
    return j.dump(2) + "\n";
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string resolve_out_dir(const std::string& cli_value) {
    if (!cli_value.empty()) return cli_value;
    if (const char* env = std::getenv("SKEWSIM_OUT_DIR"); env && *env) return env;
    return ".";
}

} // namespace skewsim
