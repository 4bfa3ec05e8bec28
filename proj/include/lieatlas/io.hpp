#pragma once

#include <json.hpp>

#include <iomanip>
#include <locale>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "classify.hpp"
#include "constructions.hpp"
#include "geodesy.hpp"
#include "invariants.hpp"

namespace lieatlas {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// JSON

inline Json to_json(const ClassLabel& c) {
    Json j{{"class", c.id}};
    if (c.param) j["lambda"] = *c.param;
    j["label"] = to_string(c);
    return j;
}

inline Json to_json(const RelationVerdict& v) { return {{"level", to_string(v.level)}, {"citation", v.citation}}; }

inline Json to_json(const GrowthType& g) {
    Json j{{"exponential", g.exponential}};
    if (!g.exponential) j["degree"] = g.degree;
    return j;
}

inline Json to_json(const BallVolumeReport& r) {
    return {{"radius", r.radius},       {"volume", r.volume},
            {"stderr", r.stderr_},      {"samples", r.samples},
            {"accepted", r.accepted},   {"boundary_rate", r.boundary_rate},
            {"expansions", r.expansions}, {"warning", r.warning}};
}

inline Json to_json(const GrowthReport& r) {
    return {{"radii", r.radii},
            {"volumes", r.volumes},
            {"stderr", r.stderrs},
            {"exponent", r.exponent},
            {"residual", r.residual},
            {"residual_linear", r.residual_linear},
            {"rate", r.rate},
            {"tail_exponent", r.tail_exponent},
            {"classification", to_json(r.classification)},
            {"warning", r.warning}};
}

inline Json to_json(const HyperbolicityReport& r) {
    return {{"scale", r.scale},
            {"delta", r.delta_estimate},
            {"samples", r.samples},
            {"seed", r.seed},
            {"distance_errors", r.distance_errors}};
}

// Row-major entries under "Q".
inline Json to_json(const FrameMetric& m) {
    std::vector<double> q;
    for (Eigen::Index i = 0; i < m.Q.rows(); ++i)
        for (Eigen::Index j = 0; j < m.Q.cols(); ++j) q.push_back(m.Q(i, j));
    return {{"Q", q}};
}

inline Json to_json(const QIConstants& c) { return {{"L", c.L}, {"C", c.C}}; }

inline Json to_json(const VerificationReport& r) {
    Json p = Json::object();
    for (const auto& [k, v] : r.params) p[k] = v;
    return {{"name", r.name}, {"pass", r.pass}, {"max_deviation", r.max_deviation}, {"params", p}, {"seed", r.seed}};
}

inline Json to_json(const QIHomeoReport& r) {
    return {{"box", r.box}, {"samples", r.samples}, {"seed", r.seed},
            {"L", r.constants.L}, {"C", r.constants.C}, {"max_ratio", r.max_ratio}};
}

inline Json to_json(const DivergenceRow& r) {
    return {{"separation", r.separation}, {"hausdorff", r.hausdorff}, {"L", r.constants.L},
            {"C", r.constants.C},         {"cross_min", r.cross_min}, {"cross_max", r.cross_max}};
}

inline Json to_json(const ClassMetadata& m) {
    return {{"growth", to_json(m.growth)}, {"hyperbolic", m.hyperbolic}, {"boundary", m.boundary}};
}

inline Json to_json(const ClassificationMatrix& m) {
    Json reps = Json::array();
    for (std::size_t i = 0; i < m.names.size(); ++i) {
        Json r{{"name", m.names[i]}, {"class", to_json(m.labels[i])}, {"metadata", to_json(class_metadata(m.labels[i].id))}};
        reps.push_back(r);
    }
    Json rows = Json::array();
    for (const auto& row : m.verdicts) {
        Json jr = Json::array();
        for (const auto& v : row) jr.push_back(to_json(v));
        rows.push_back(jr);
    }
    return {{"representatives", reps}, {"verdicts", rows}};
}

// ---------------------------------------------------------------------------
// CSV: header row, '.' decimal separator, quoted only when needed

inline std::string csv_number(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(12) << v;
    return os.str();
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline void write_csv(std::ostream& os, const CsvTable& t) {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_field(cells[i]);
        os << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
}

inline CsvTable to_csv(const std::vector<DivergenceRow>& rows) {
    CsvTable t{{"separation", "hausdorff", "L", "C", "cross_min", "cross_max"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({csv_number(r.separation), csv_number(r.hausdorff), csv_number(r.constants.L),
                          csv_number(r.constants.C), csv_number(r.cross_min), csv_number(r.cross_max)});
    return t;
}

inline CsvTable to_csv(const GrowthReport& r) {
    CsvTable t{{"radius", "volume", "stderr"}, {}};
    for (std::size_t i = 0; i < r.radii.size(); ++i)
        t.rows.push_back({csv_number(r.radii[i]), csv_number(r.volumes[i]), csv_number(r.stderrs[i])});
    return t;
}

inline CsvTable to_csv(const std::vector<HyperbolicityReport>& rs) {
    CsvTable t{{"scale", "delta", "samples", "distance_errors"}, {}};
    for (const auto& r : rs)
        t.rows.push_back({csv_number(r.scale), csv_number(r.delta_estimate), std::to_string(r.samples),
                          std::to_string(r.distance_errors)});
    return t;
}

inline CsvTable to_csv(const std::vector<VerificationReport>& rs) {
    CsvTable t{{"name", "pass", "max_deviation", "params", "seed"}, {}};
    for (const auto& r : rs) {
        std::string params;
        for (const auto& [k, v] : r.params) params += (params.empty() ? "" : ";") + k + "=" + csv_number(v);
        t.rows.push_back({r.name, r.pass ? "true" : "false", csv_number(r.max_deviation), params, std::to_string(r.seed)});
    }
    return t;
}

// Long format: one row per ordered pair.
inline CsvTable to_csv(const ClassificationMatrix& m) {
    CsvTable t{{"a", "b", "class_a", "class_b", "level", "citation"}, {}};
    for (std::size_t i = 0; i < m.names.size(); ++i)
        for (std::size_t j = 0; j < m.names.size(); ++j)
            t.rows.push_back({m.names[i], m.names[j], to_string(m.labels[i]), to_string(m.labels[j]),
                              to_string(m.verdicts[i][j].level), m.verdicts[i][j].citation});
    return t;
}

}  // namespace lieatlas
