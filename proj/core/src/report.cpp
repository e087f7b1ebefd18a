#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "sdom/errors.hpp"
#include "sdom/harness.hpp"

namespace sdom {

namespace {

using json = nlohmann::json;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// NaN/inf are not JSON; the few fields that can saturate (verification
// ratios against vanished averages) degrade to null rather than breaking
// the document.
json num_or_null(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

json config_echo(const ExperimentConfig& cfg) {
    json j = json::parse(cfg.to_json_text());
    // Worker count is an execution knob, not an experiment parameter; the
    // same config must yield byte-identical reports at any worker count.
    j.erase("workers");
    return j;
}

json cube_triple(const DyadicCube& q) {
    return json::array({q.grid, q.level, q.index});
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoFailure("short write to " + path);
}

std::vector<std::string> emit(const ExperimentConfig& cfg, const std::string& csv,
                              const std::string& jsonText) {
    const bool want_csv = cfg.format == "csv" || cfg.format == "both";
    const bool want_json = cfg.format == "json" || cfg.format == "both";
    if (!want_csv && !want_json)
        throw IoFailure("unknown report format '" + cfg.format +
                        "': expected csv, json, or both");
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec)
        throw IoFailure("cannot create output directory " + cfg.out_dir + ": " +
                        ec.message());
    std::vector<std::string> written;
    const std::filesystem::path base =
        std::filesystem::path(cfg.out_dir) / cfg.experiment;
    if (want_csv) {
        const std::string p = base.string() + ".csv";
        write_file(p, csv);
        written.push_back(p);
    }
    if (want_json) {
        const std::string p = base.string() + ".json";
        write_file(p, jsonText);
        written.push_back(p);
    }
    return written;
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

} // namespace

// -------------------------------------------------------------------- decay

std::string decay_csv(const DecayReport& rep) {
    std::string out = "t,fraction\n";
    for (std::size_t k = 0; k < rep.t_grid.size(); ++k)
        out += fmt17(rep.t_grid[k]) + "," + fmt17(rep.fraction[k]) + "\n";
    return out;
}

std::string decay_json(const DecayReport& rep, const ExperimentConfig& cfg) {
    json j;
    j["alpha_hat"] = num_or_null(rep.alpha_hat);
    j["c_hat"] = num_or_null(rep.c_hat);
    j["config"] = config_echo(cfg);
    j["fraction"] = rep.fraction;
    j["r_squared"] = num_or_null(rep.r_squared);
    j["skipped"] = rep.skipped;
    j["t_grid"] = rep.t_grid;
    j["trials"] = rep.trials;
    j["version"] = kVersion;
    return dump(j);
}

std::vector<std::string> write_report(const DecayReport& rep,
                                      const ExperimentConfig& cfg) {
    return emit(cfg, decay_csv(rep), decay_json(rep, cfg));
}

// ----------------------------------------------------------------- dominate

std::string dominate_csv(const DominateOutcome& rep) {
    std::string out = "grid,level,index\n";
    for (const DyadicCube& q : rep.result.cubes)
        out += std::to_string(q.grid) + "," + std::to_string(q.level) + "," +
               std::to_string(q.index) + "\n";
    return out;
}

std::string dominate_json(const DominateOutcome& rep,
                          const ExperimentConfig& cfg) {
    const DominationResult& r = rep.result;
    json j;
    j["A"] = num_or_null(r.threshold_a);
    j["argmax"] = r.argmax;
    j["c_empirical"] = num_or_null(r.c_empirical);
    j["config"] = config_echo(cfg);
    json fam = json::array();
    for (const DyadicCube& q : r.cubes) fam.push_back(cube_triple(q));
    j["family"] = fam;
    json covers = json::array();
    for (const auto& c : r.covers)
        covers.push_back(c ? cube_triple(*c) : json(nullptr));
    j["covers"] = covers;
    j["node_count"] = r.node_count;
    j["operator"] = rep.op_name;
    j["recursion_depth"] = r.recursion_depth;
    j["skipped"] = r.skipped;
    json v;
    v["argmax"] = rep.verification.argmax;
    v["histogram"] = rep.verification.histogram;
    v["max_ratio"] = num_or_null(rep.verification.max_ratio);
    v["packing_certified"] = rep.verification.packing_certified;
    v["skipped"] = rep.verification.skipped;
    j["verification"] = v;
    j["version"] = kVersion;
    return dump(j);
}

std::vector<std::string> write_report(const DominateOutcome& rep,
                                      const ExperimentConfig& cfg) {
    return emit(cfg, dominate_csv(rep), dominate_json(rep, cfg));
}

// -------------------------------------------------------------- sharp check

std::string sharp_csv(const SharpCheckReport& rep) {
    std::string out = "kappa_hat,slack,max_ratio,violations,skipped,trials\n";
    out += fmt17(rep.kappa_hat) + "," + fmt17(rep.slack) + "," +
           fmt17(rep.max_ratio) + "," + std::to_string(rep.violations) + "," +
           std::to_string(rep.skipped) + "," + std::to_string(rep.trials) + "\n";
    return out;
}

std::string sharp_json(const SharpCheckReport& rep, const ExperimentConfig& cfg) {
    json j;
    j["config"] = config_echo(cfg);
    j["kappa_hat"] = num_or_null(rep.kappa_hat);
    j["max_ratio"] = num_or_null(rep.max_ratio);
    j["ok"] = rep.ok();
    j["skipped"] = rep.skipped;
    j["slack"] = rep.slack;
    j["trials"] = rep.trials;
    j["violations"] = rep.violations;
    j["version"] = kVersion;
    return dump(j);
}

std::vector<std::string> write_report(const SharpCheckReport& rep,
                                      const ExperimentConfig& cfg) {
    return emit(cfg, sharp_csv(rep), sharp_json(rep, cfg));
}

// -------------------------------------------------------------------- kappa

std::string kappa_csv(const KappaOutcome& rep) {
    std::string out = "k_max,kappa\n";
    for (std::size_t i = 0; i < rep.result.kappa_by_kmax.size(); ++i)
        out += std::to_string(i + 1) + "," + fmt17(rep.result.kappa_by_kmax[i]) +
               "\n";
    return out;
}

std::string kappa_json(const KappaOutcome& rep, const ExperimentConfig& cfg) {
    json j;
    j["config"] = config_echo(cfg);
    j["kappa_by_kmax"] = rep.result.kappa_by_kmax;
    j["kappa_hat"] = num_or_null(rep.result.kappa_hat);
    j["kernel"] = rep.kernel;
    j["probes_used"] = rep.result.probes_used;
    j["r"] = rep.r;
    j["version"] = kVersion;
    return dump(j);
}

std::vector<std::string> write_report(const KappaOutcome& rep,
                                      const ExperimentConfig& cfg) {
    return emit(cfg, kappa_csv(rep), kappa_json(rep, cfg));
}

// ------------------------------------------------------------------- lerner

std::string lerner_csv(const LernerOutcome& rep) {
    std::string out = "grid,level,index,omega\n";
    for (std::size_t k = 0; k < rep.result.cubes.size(); ++k) {
        const DyadicCube& q = rep.result.cubes[k];
        out += std::to_string(q.grid) + "," + std::to_string(q.level) + "," +
               std::to_string(q.index) + "," + fmt17(rep.result.omega[k]) + "\n";
    }
    return out;
}

std::string lerner_json(const LernerOutcome& rep, const ExperimentConfig& cfg) {
    json j;
    j["bound_ok"] = rep.bound_ok;
    j["config"] = config_echo(cfg);
    j["cube_count"] = rep.result.cubes.size();
    j["lambda"] = rep.result.lambda;
    j["max_defect"] = num_or_null(rep.max_defect);
    j["packing_ok"] = rep.packing_ok;
    j["root_median"] = num_or_null(rep.result.root_median);
    j["trials"] = rep.trials;
    j["version"] = kVersion;
    return dump(j);
}

std::vector<std::string> write_report(const LernerOutcome& rep,
                                      const ExperimentConfig& cfg) {
    return emit(cfg, lerner_csv(rep), lerner_json(rep, cfg));
}

// ----------------------------------------------------------------- selftest

std::string selftest_json(const SelftestReport& rep, const ExperimentConfig& cfg) {
    json j;
    j["config"] = config_echo(cfg);
    json fails = json::array();
    for (const SelftestFailure& f : rep.failures) {
        json row;
        row["suite"] = f.suite;
        row["witness"] = f.witness;
        fails.push_back(row);
    }
    j["failures"] = fails;
    j["ok"] = rep.ok();
    j["passed"] = rep.passed;
    j["version"] = kVersion;
    return dump(j);
}

std::vector<std::string> write_report(const SelftestReport& rep,
                                      const ExperimentConfig& cfg) {
    std::string csv = "suite,status,witness\n";
    for (const std::string& s : rep.passed)
        csv += csv_quote(s) + ",pass,\"\"\n";
    for (const SelftestFailure& f : rep.failures)
        csv += csv_quote(f.suite) + ",fail," + csv_quote(f.witness) + "\n";
    return emit(cfg, csv, selftest_json(rep, cfg));
}

} // namespace sdom
