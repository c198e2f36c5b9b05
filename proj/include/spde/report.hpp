#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spde/config.hpp"
#include "spde/version.hpp"

namespace spde {

// One acceptance line: the verdict always cites the measured number and the
// threshold it was held against.
struct CriterionResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct Curve {
    std::string name;                       // becomes <name>.csv
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
    std::string kind;
    std::vector<CriterionResult> criteria;
    std::vector<Curve> curves;
    std::map<std::string, std::string> labels;
    nlohmann::json extra;  // experiment-specific summary block
    std::string config_hash;
    std::uint64_t seed = 0;
    int total_paths = 0;
    int diverged_paths = 0;

    bool pass() const {
        for (const auto& c : criteria)
            if (!c.pass) return false;
        return true;
    }

    CriterionResult& add_criterion(const std::string& name, bool pass, double measured,
                                   double threshold, const std::string& detail = "") {
        criteria.push_back({name, pass, measured, threshold, detail});
        return criteria.back();
    }
};

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

inline std::string csv_of(const Curve& curve) {
    std::string text;
    for (std::size_t c = 0; c < curve.columns.size(); ++c) {
        if (c) text += ",";
        text += curve.columns[c];
    }
    text += "\n";
    char buf[64];
    for (const auto& row : curve.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) text += ",";
            std::snprintf(buf, sizeof(buf), "%.17g", row[c]);
            text += buf;
        }
        text += "\n";
    }
    return text;
}

}  // namespace detail

// Writes report.json, one CSV per curve, and manifest.json. Outputs carry no
// wall-clock state: two runs with equal manifests are byte-identical.
inline std::vector<std::string> emit_report(const ExperimentReport& report,
                                            const RunConfig& config,
                                            const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> files;

    for (const auto& curve : report.curves) {
        const std::string fname = curve.name + ".csv";
        detail::write_text_file(out_dir / fname, detail::csv_of(curve));
        files.push_back(fname);
    }

    nlohmann::json jr;
    jr["kind"] = report.kind;
    jr["pass"] = report.pass();
    jr["config_hash"] = report.config_hash;
    jr["seed"] = report.seed;
    jr["version"] = kVersion;
    jr["total_paths"] = report.total_paths;
    jr["diverged_paths"] = report.diverged_paths;
    nlohmann::json jcrit = nlohmann::json::array();
    for (const auto& c : report.criteria) {
        nlohmann::json jc;
        jc["name"] = c.name;
        jc["pass"] = c.pass;
        jc["measured"] = c.measured;
        jc["threshold"] = c.threshold;
        jc["detail"] = c.detail;
        jcrit.push_back(jc);
    }
    jr["criteria"] = jcrit;
    nlohmann::json jlabels;
    for (const auto& [k, v] : report.labels) jlabels[k] = v;
    jr["labels"] = jlabels;
    if (!report.extra.is_null()) jr["summary"] = report.extra;
    detail::write_text_file(out_dir / "report.json", jr.dump(2) + "\n");
    files.push_back("report.json");

    nlohmann::json jm;
    jm["config_hash"] = config.hash_hex();
    jm["seed"] = config.noise_seed;
    jm["version"] = kVersion;
    jm["config"] = config.canonical();
    nlohmann::json joutputs = nlohmann::json::array();
    for (const auto& f : files) joutputs.push_back(f);
    joutputs.push_back("manifest.json");
    jm["outputs"] = joutputs;
    detail::write_text_file(out_dir / "manifest.json", jm.dump(2) + "\n");
    files.push_back("manifest.json");
    return files;
}

// Framed binary snapshot record: magic, version, grid meta, step index,
// time, then the interior nodal values as little-endian doubles.
inline void write_snapshot(std::ofstream& out, const GridFunction& u, int step_index,
                           double time) {
    const char magic[4] = {'S', 'P', 'D', 'E'};
    out.write(magic, 4);
    const std::uint32_t version = 1;
    const std::uint32_t n = static_cast<std::uint32_t>(u.size());
    const double length = u.grid->length();
    const std::uint64_t step = static_cast<std::uint64_t>(step_index);
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(&length), sizeof(length));
    out.write(reinterpret_cast<const char*>(&step), sizeof(step));
    out.write(reinterpret_cast<const char*>(&time), sizeof(time));
    out.write(reinterpret_cast<const char*>(u.v.data()),
              static_cast<std::streamsize>(u.v.size() * sizeof(double)));
}

struct SnapshotRecord {
    std::uint32_t version = 0;
    std::uint64_t step = 0;
    double time = 0.0;
    double domain_length = 0.0;
    std::vector<double> values;
};

inline bool read_snapshot(std::ifstream& in, SnapshotRecord& rec) {
    char magic[4];
    if (!in.read(magic, 4)) return false;
    if (magic[0] != 'S' || magic[1] != 'P' || magic[2] != 'D' || magic[3] != 'E')
        throw std::runtime_error("snapshot stream: bad magic");
    std::uint32_t n = 0;
    in.read(reinterpret_cast<char*>(&rec.version), sizeof(rec.version));
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&rec.domain_length), sizeof(rec.domain_length));
    in.read(reinterpret_cast<char*>(&rec.step), sizeof(rec.step));
    in.read(reinterpret_cast<char*>(&rec.time), sizeof(rec.time));
    rec.values.resize(n);
    in.read(reinterpret_cast<char*>(rec.values.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw std::runtime_error("snapshot stream: truncated record");
    return true;
}

// Trajectory dump: framed binary snapshots next to a JSONL diagnostics file
// (one object per recorded step).
inline void emit_trajectory(const Trajectory& traj, const std::filesystem::path& out_dir,
                            const std::string& base) {
    std::filesystem::create_directories(out_dir);
    std::ofstream snap(out_dir / (base + ".snap"), std::ios::binary);
    if (!snap) throw std::runtime_error("cannot write snapshot file");
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k)
        write_snapshot(snap, traj.snapshots[k], static_cast<int>(k), traj.times[k]);

    std::ofstream jsonl(out_dir / (base + ".jsonl"), std::ios::binary);
    char buf[256];
    for (std::size_t k = 0; k < traj.diagnostics.size(); ++k) {
        const auto& d = traj.diagnostics[k];
        std::snprintf(buf, sizeof(buf),
                      "{\"record\":%zu,\"t\":%.17g,\"l1\":%.17g,\"h\":%.17g,"
                      "\"h1\":%.17g,\"dissipation\":%.17g}\n",
                      k, d.t, d.l1, d.h, d.h1, d.dissipation);
        jsonl << buf;
    }
}

}  // namespace spde
