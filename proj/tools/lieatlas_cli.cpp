// Command-line front end: classification queries, geometry computations and
// the reproducible experiments.

#include <CLI11.hpp>

#include <lieatlas/io.hpp>
#include <lieatlas/lieatlas.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace lieatlas;

namespace {

struct GlobalOptions {
    std::uint64_t seed = 0;
    double tol = 0.0;  // 0: use each check's own threshold
    int samples = 0;   // 0: use each command's default
    double step = 0.01;
    std::string out;
    std::string format = "json";
};

struct Result {
    Json json;
    std::optional<CsvTable> csv;
    bool pass = true;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw UsageError("not a number: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

Vec to_vec(const std::vector<double>& v) {
    Vec r(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) r[static_cast<Eigen::Index>(i)] = v[i];
    return r;
}

FrameMetric parse_metric(const GroupSpec& s, const std::string& text) {
    if (text.empty()) return default_metric(s);
    std::vector<double> v = parse_list(text);
    int n = algebra_dim(s);
    FrameMetric m{Mat::Zero(n, n)};
    if (static_cast<int>(v.size()) == n) {
        for (int i = 0; i < n; ++i) m.Q(i, i) = v[static_cast<std::size_t>(i)];
    } else if (static_cast<int>(v.size()) == n * n) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m.Q(i, j) = v[static_cast<std::size_t>(i * n + j)];
    } else {
        throw UsageError("--metric needs " + std::to_string(n) + " diagonal or " + std::to_string(n * n) + " entries");
    }
    validate_metric(s, m);
    return m;
}

int pick(int given, int fallback) { return given > 0 ? given : fallback; }

bool within(double dev, double tol, double fallback) { return dev < (tol > 0.0 ? tol : fallback); }

VerificationReport retol(VerificationReport r, double tol, double fallback) {
    r.pass = within(r.max_deviation, tol, fallback);
    return r;
}

Result reports_result(const std::vector<VerificationReport>& rs) {
    Result res;
    res.json = Json::array();
    for (const auto& r : rs) {
        res.json.push_back(to_json(r));
        res.pass = res.pass && r.pass;
    }
    res.csv = to_csv(rs);
    return res;
}

void emit(const Result& r, const GlobalOptions& g) {
    std::ostringstream os;
    if (g.format == "csv") {
        if (!r.csv) throw UsageError("this command has no CSV form; use --format json");
        write_csv(os, *r.csv);
    } else {
        os << r.json.dump(2) << '\n';
    }
    if (g.out.empty()) {
        std::cout << os.str();
        return;
    }
    std::ofstream f(g.out);
    if (!f) throw UsageError("cannot write " + g.out);
    f << os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometry and classification of Lie groups of dimension at most 3 with left-invariant metrics"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--tol", g.tol, "pass threshold for verifications (default: per check)");
    app.add_option("--samples", g.samples, "sample count (default: per command)");
    app.add_option("--step", g.step, "integration step for geodesics")->capture_default_str();
    app.add_option("--out", g.out, "write the result to this file instead of stdout");
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    std::optional<Result> result;

    // classify / compare / table
    std::string spec_a, spec_b;
    auto* cls = app.add_subcommand("classify", "class label of a group");
    cls->add_option("spec", spec_a, "group spec string, e.g. N3 or D:lambda=-1")->required();
    cls->callback([&] {
        Result r;
        GroupSpec s = parse_spec(spec_a);
        r.json = to_json(classify(s));
        r.csv = CsvTable{{"group", "class", "label"}, {{to_string(s), std::to_string(classify(s).id), to_string(classify(s))}}};
        result = r;
    });

    auto* cmp = app.add_subcommand("compare", "strongest relation between two groups");
    cmp->add_option("a", spec_a)->required();
    cmp->add_option("b", spec_b)->required();
    cmp->callback([&] {
        Result r;
        RelationVerdict v = strongest_relation(parse_spec(spec_a), parse_spec(spec_b));
        r.json = to_json(v);
        r.csv = CsvTable{{"a", "b", "level", "citation"}, {{spec_a, spec_b, to_string(v.level), v.citation}}};
        result = r;
    });

    auto* tab = app.add_subcommand("table", "classification matrix over all representatives");
    tab->callback([&] {
        ClassificationMatrix m = classification_matrix();
        result = Result{to_json(m), to_csv(m), true};
    });

    // run <experiment>
    auto* run = app.add_subcommand("run", "run an experiment or verification");
    run->require_subcommand(1);

    std::string group = "R^3", metric_text;
    double lambda = -1.0, box = 10.0, radius = 1.0, time = 1.0;
    std::string seps = "10,100,1000,10000", radii_text, scales_text = "4,8,16", ks = "1,2,3,5";
    std::string total_text = "SE2~", base_text = "SE2:k=1", from_text, to_text, vel_text;
    int legs = 32;

    auto* se2 = run->add_subcommand("verify-se2", "left-invariance of the Euclidean distance on the SE(2) cover");
    se2->callback([&] {
        result = reports_result({retol(verify_se2_left_invariance(pick(g.samples, 1000), g.seed), g.tol, 1e-12)});
    });

    auto* cyl = run->add_subcommand("verify-cylinder", "cylinder isometry and left-invariance on SE(2)_k");
    cyl->add_option("--k", ks, "comma-separated k values")->capture_default_str();
    cyl->callback([&] {
        std::vector<VerificationReport> rs;
        for (double k : parse_list(ks)) {
            if (k != std::floor(k)) throw UsageError("k must be an integer");
            int ki = static_cast<int>(k);
            rs.push_back(retol(verify_cylinder_isometry(ki, pick(g.samples, 1000), g.seed), g.tol, 1e-12));
            rs.push_back(retol(verify_eq4_left_invariance(ki, pick(g.samples, 1000), g.seed), g.tol, 1e-12));
        }
        result = reports_result(rs);
    });

    auto* cov = run->add_subcommand("verify-covering", "covering projection is a local isometry");
    cov->add_option("--total", total_text)->capture_default_str();
    cov->add_option("--base", base_text)->capture_default_str();
    cov->add_option("--metric", metric_text, "frame metric: n diagonal or n*n entries");
    cov->callback([&] {
        GroupSpec t = parse_spec(total_text), b = parse_spec(base_text);
        VerificationReport r = verify_covering_local_isometry(t, b, parse_metric(t, metric_text), pick(g.samples, 200), g.seed);
        result = reports_result({retol(r, g.tol, 1e-8)});
    });

    auto* nq = run->add_subcommand("n3star-qi", "identity map N3* -> R^2 x T^1 as a quasi-isometry");
    nq->add_option("--box", box, "half-width of the sampling box")->capture_default_str();
    nq->callback([&] {
        int n = pick(g.samples, 400);
        QIHomeoReport a = n3star_qi_homeo(n, box, g.seed), b = n3star_qi_homeo(n, 2.0 * box, g.seed);
        QIHomeoReport ca = r3_n3_identity_fit(n, box, g.seed), cb = r3_n3_identity_fit(n, 2.0 * box, g.seed);
        double drift = std::abs((b.constants.L + b.constants.C) / (a.constants.L + a.constants.C) - 1.0);
        Result r;
        r.pass = drift <= (g.tol > 0.0 ? g.tol : 0.2);
        r.json = {{"n3star", {to_json(a), to_json(b)}},
                  {"relative_drift", drift},
                  {"pass", r.pass},
                  {"contrast_r3_n3", {to_json(ca), to_json(cb)}}};
        CsvTable t{{"map", "box", "L", "C", "max_ratio"}, {}};
        for (auto [name, rep] : {std::pair{"n3star", a}, {"n3star", b}, {"r3_n3", ca}, {"r3_n3", cb}})
            t.rows.push_back({name, csv_number(rep.box), csv_number(rep.constants.L), csv_number(rep.constants.C),
                              csv_number(rep.max_ratio)});
        r.csv = t;
        result = r;
    });

    auto* div = run->add_subcommand("divergence", "Hausdorff divergence of the two quasi-geodesics in D_lambda");
    div->add_option("--lambda", lambda, "lambda in [-1, 0)")->capture_default_str();
    div->add_option("--seps", seps, "comma-separated separations")->capture_default_str();
    div->add_option("--legs", legs, "samples per curve leg")->capture_default_str();
    div->callback([&] {
        std::vector<DivergenceRow> rows = divergence_experiment(lambda, parse_list(seps), g.seed, legs);
        Result r;
        r.json = Json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            r.json.push_back(to_json(rows[i]));
            if (i > 0 && !(rows[i].hausdorff > rows[i - 1].hausdorff)) r.pass = false;
        }
        r.csv = to_csv(rows);
        result = r;
    });

    auto* gro = run->add_subcommand("growth", "volume growth of balls around the identity");
    gro->add_option("--group", group)->capture_default_str();
    gro->add_option("--radii", radii_text, "comma-separated radii (default 2,3,4,5,6)");
    gro->add_option("--metric", metric_text, "frame metric: n diagonal or n*n entries");
    gro->callback([&] {
        GroupSpec s = parse_spec(group);
        std::vector<double> radii = radii_text.empty() ? std::vector<double>{2, 3, 4, 5, 6} : parse_list(radii_text);
        GrowthReport rep = growth_exponent(s, parse_metric(s, metric_text), radii, pick(g.samples, 1000), g.seed);
        Result r;
        r.json = to_json(rep);
        r.json["group"] = to_string(s);
        r.json["algebraic"] = to_json(growth_type_algebraic(s));
        r.csv = to_csv(rep);
        result = r;
    });

    auto* ball = run->add_subcommand("ball", "Riemannian volume of one ball");
    ball->add_option("--group", group)->capture_default_str();
    ball->add_option("--radius", radius)->capture_default_str();
    ball->add_option("--metric", metric_text, "frame metric: n diagonal or n*n entries");
    ball->callback([&] {
        GroupSpec s = parse_spec(group);
        BallVolumeReport rep = ball_volume_report(s, parse_metric(s, metric_text), radius, pick(g.samples, 1000), g.seed);
        CsvTable t{{"radius", "volume", "stderr", "samples", "accepted", "boundary_rate", "warning"},
                   {{csv_number(rep.radius), csv_number(rep.volume), csv_number(rep.stderr_), std::to_string(rep.samples),
                     std::to_string(rep.accepted), csv_number(rep.boundary_rate), rep.warning ? "true" : "false"}}};
        result = Result{to_json(rep), t, true};
    });

    auto* hyp = run->add_subcommand("hyperbolicity", "four-point delta at several scales");
    hyp->add_option("--group", group)->capture_default_str();
    hyp->add_option("--scales", scales_text)->capture_default_str();
    hyp->add_option("--metric", metric_text, "frame metric: n diagonal or n*n entries");
    hyp->callback([&] {
        GroupSpec s = parse_spec(group);
        FrameMetric m = parse_metric(s, metric_text);
        std::vector<HyperbolicityReport> rs;
        Result r;
        r.json = Json::array();
        for (double sc : parse_list(scales_text)) {
            rs.push_back(hyperbolicity_delta(s, m, sc, pick(g.samples, 30), g.seed));
            r.json.push_back(to_json(rs.back()));
        }
        r.csv = to_csv(rs);
        result = r;
    });

    auto* dist = run->add_subcommand("distance", "left-invariant Riemannian distance between two elements");
    dist->add_option("--group", group)->capture_default_str();
    dist->add_option("--from", from_text, "comma-separated coordinates")->required();
    dist->add_option("--to", to_text, "comma-separated coordinates")->required();
    dist->add_option("--metric", metric_text, "frame metric: n diagonal or n*n entries");
    dist->callback([&] {
        GroupSpec s = parse_spec(group);
        GroupElement p(to_vec(parse_list(from_text))), q(to_vec(parse_list(to_text)));
        DistanceEngine eng(s, parse_metric(s, metric_text));
        double d = eng.distance(p, q), lb = eng.lower_bound(p, q), ub = eng.upper_bound(p, q);
        Result r;
        r.json = {{"group", to_string(s)}, {"distance", d}, {"lower_bound", lb}, {"upper_bound", ub}};
        r.csv = CsvTable{{"distance", "lower_bound", "upper_bound"}, {{csv_number(d), csv_number(lb), csv_number(ub)}}};
        result = r;
    });

    auto* geo = run->add_subcommand("geodesic", "integrate a geodesic from an initial point and velocity");
    geo->add_option("--group", group)->capture_default_str();
    geo->add_option("--from", from_text, "comma-separated coordinates")->required();
    geo->add_option("--velocity", vel_text, "chart velocity (body components for quaternion groups)")->required();
    geo->add_option("--time", time)->capture_default_str();
    geo->add_option("--metric", metric_text, "frame metric: n diagonal or n*n entries");
    geo->callback([&] {
        GroupSpec s = parse_spec(group);
        if (!(g.step > 0.0)) throw UsageError("--step must be positive");
        int steps = std::max(8, static_cast<int>(std::ceil(std::abs(time) / g.step)));
        Curve c = geodesic_shoot(s, parse_metric(s, metric_text), GroupElement(to_vec(parse_list(from_text))),
                                 to_vec(parse_list(vel_text)), time, steps);
        Result r;
        r.json = Json::array();
        CsvTable t;
        t.header = {"t"};
        for (Eigen::Index i = 0; i < c.samples.front().size(); ++i) t.header.push_back("x" + std::to_string(i));
        for (std::size_t i = 0; i < c.samples.size(); ++i) {
            std::vector<double> x(c.samples[i].coords.data(), c.samples[i].coords.data() + c.samples[i].size());
            r.json.push_back({{"t", c.times[i]}, {"x", x}});
            std::vector<std::string> row{csv_number(c.times[i])};
            for (double v : x) row.push_back(csv_number(v));
            t.rows.push_back(row);
        }
        r.csv = t;
        result = r;
    });

    auto* curv = run->add_subcommand("curvature", "sectional curvature at random points and planes");
    curv->add_option("--group", group)->capture_default_str();
    curv->add_option("--metric", metric_text, "frame metric: n diagonal or n*n entries");
    curv->callback([&] {
        GroupSpec s = parse_spec(group);
        FrameMetric m = parse_metric(s, metric_text);
        Chart c = chart(s);
        bool quat = kind_of(s) == Kind::Quaternion;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        int n = pick(g.samples, 100);
        for (int i = 0; i < n; ++i) {
            CounterRng rng = make_rng(g.seed, 31, static_cast<std::uint64_t>(i));
            Vec x(c.dim);
            for (int j = 0; j < c.dim; ++j) x[j] = quat ? rng.normal() : rng.uniform(-2.0, 2.0);
            if (quat) x.normalize();
            int d = algebra_dim(s);
            Vec u(quat ? 3 : d), v(quat ? 3 : d);
            for (int j = 0; j < u.size(); ++j) u[j] = rng.normal(), v[j] = rng.normal();
            double k = sectional_curvature(s, m, GroupElement(Vec(normalize_vec(s, c, x))), u, v);
            lo = std::min(lo, k);
            hi = std::max(hi, k);
        }
        Result r;
        r.json = {{"group", to_string(s)}, {"samples", n}, {"min", lo}, {"max", hi}};
        r.csv = CsvTable{{"min", "max", "samples"}, {{csv_number(lo), csv_number(hi), std::to_string(n)}}};
        result = r;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const lieatlas::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    if (!result) return 1;
    try {
        emit(*result, g);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return result->pass ? 0 : 2;
}
