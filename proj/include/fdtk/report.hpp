#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdtk/criterion.hpp"
#include "fdtk/differential.hpp"
#include "fdtk/fields.hpp"
#include "fdtk/maps.hpp"
#include "fdtk/modulus.hpp"

namespace fdtk {

using nlohmann::json;

// 17 significant digits: round-trips a double exactly and keeps CSV output
// byte-stable across runs.
inline std::string format_real(Real v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed,
                       const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ValidationError(where + ": unknown key '" + it.key() + "'");
}

inline Real require_number(const json& j, const std::string& key,
                           const std::string& where) {
    if (!j.contains(key) || !j[key].is_number())
        throw ValidationError(where + ": missing numeric field '" + key + "'");
    return j[key].get<Real>();
}

inline std::string require_string(const json& j, const std::string& key,
                                  const std::string& where) {
    if (!j.contains(key) || !j[key].is_string())
        throw ValidationError(where + ": missing string field '" + key + "'");
    return j[key].get<std::string>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subject parsing (maps and fields by name and parameters)
// ---------------------------------------------------------------------------

inline PowerLogParams parse_power_log(const json& j, const std::string& where) {
    detail::check_keys(j, {"c", "gamma", "s"}, where);
    PowerLogParams p;
    p.c = j.value("c", 1.0);
    p.gamma = j.value("gamma", 0.0);
    p.s = j.value("s", 0.0);
    if (p.c <= 0) throw ValidationError(where + ": c must be positive");
    return p;
}

inline Profile parse_profile(const json& j) {
    const std::string type = detail::require_string(j, "type", "profile");
    if (type == "power_shift") {
        detail::check_keys(j, {"type", "alpha"}, "profile");
        return PowerShiftProfile(detail::require_number(j, "alpha", "profile"));
    }
    if (type == "exp_integral") {
        detail::check_keys(j, {"type", "q", "n"}, "profile");
        int n = (int)detail::require_number(j, "n", "profile");
        if (!j.contains("q")) throw ValidationError("profile: exp_integral needs 'q'");
        return ExpIntegralProfile(parse_power_log(j["q"], "profile.q"), n);
    }
    if (type == "tabulated") {
        detail::check_keys(j, {"type", "radii", "values"}, "profile");
        return TabulatedProfile(j["radii"].get<std::vector<Real>>(),
                                j["values"].get<std::vector<Real>>());
    }
    throw ValidationError("profile: unknown type '" + type + "'");
}

inline MapSpec parse_map_spec(const json& j) {
    const std::string type = detail::require_string(j, "type", "map");
    if (type == "radial") {
        detail::check_keys(j, {"type", "profile", "n"}, "map");
        if (!j.contains("profile")) throw ValidationError("map: radial needs 'profile'");
        return RadialMap(parse_profile(j["profile"]),
                         (int)detail::require_number(j, "n", "map"));
    }
    if (type == "twist") {
        detail::check_keys(j, {"type", "m", "n"}, "map");
        return TwistMap((int)detail::require_number(j, "m", "map"),
                        (int)detail::require_number(j, "n", "map"));
    }
    if (type == "planar_power") {
        detail::check_keys(j, {"type", "k"}, "map");
        return PlanarPowerMap((int)detail::require_number(j, "k", "map"));
    }
    if (type == "planar_shear") {
        detail::check_keys(j, {"type", "kappa"}, "map");
        return PlanarShearMap(detail::require_number(j, "kappa", "map"));
    }
    throw ValidationError("map: unknown type '" + type + "'");
}

inline QField parse_qfield(const json& j) {
    const std::string type = detail::require_string(j, "type", "field");
    if (type == "power_log") {
        detail::check_keys(j, {"type", "c", "gamma", "s", "n"}, "field");
        int n = (int)detail::require_number(j, "n", "field");
        json params = j;
        params.erase("type");
        params.erase("n");
        return PowerLogField(parse_power_log(params, "field"), n);
    }
    if (type == "from_map") {
        detail::check_keys(j, {"type", "map", "exponent", "multiplicity"}, "field");
        if (!j.contains("map")) throw ValidationError("field: from_map needs 'map'");
        MapSpec spec = parse_map_spec(j["map"]);
        Real e = 1.0;
        if (j.contains("exponent")) {
            if (j["exponent"].is_string() && j["exponent"] == "inverse")
                e = 1.0 / Real(map_dimension(spec) - 1);
            else
                e = detail::require_number(j, "exponent", "field");
        }
        return FromMapField(std::move(spec), e, j.value("multiplicity", 1));
    }
    if (type == "tabulated") {
        detail::check_keys(j, {"type", "radii", "values", "n"}, "field");
        return TabulatedRadialField(j["radii"].get<std::vector<Real>>(),
                                    j["values"].get<std::vector<Real>>(),
                                    (int)detail::require_number(j, "n", "field"));
    }
    if (type == "log_radial") {
        // Q(x) = log(1/|x|); exact form of the model FMO field
        detail::check_keys(j, {"type", "n"}, "field");
        int n = (int)detail::require_number(j, "n", "field");
        return GenericRadialField{[](Real r) { return std::log(1.0 / r); }, n,
                                  std::nullopt};
    }
    throw ValidationError("field: unknown type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Job configuration
// ---------------------------------------------------------------------------

struct JobConfig {
    std::string command;  // analyze | criterion | fmo | modulus | reproduce
    json subject;         // raw; parsed per command
    int n = 3;
    int quad_order = 16;
    int eps_decades = 8;
    Real eps0 = 0.5;
    unsigned seed = 1;
    int workers = 1;
    json extra;  // command-specific parameters (ring radii, points, ...)
};

inline JobConfig parse_job_config(const json& j) {
    detail::check_keys(j,
                       {"command", "subject", "n", "options", "ring", "points",
                        "radii", "phi", "hypotheses"},
                       "job");
    JobConfig cfg;
    cfg.command = detail::require_string(j, "command", "job");
    static const std::set<std::string> commands = {"analyze", "criterion", "fmo",
                                                   "modulus", "reproduce"};
    if (!commands.count(cfg.command))
        throw ValidationError("job: unknown command '" + cfg.command + "'");
    cfg.n = (int)j.value("n", 3.0);
    if (cfg.n < 2) throw ValidationError("job: n must be >= 2");
    if (j.contains("subject")) cfg.subject = j["subject"];
    if (j.contains("options")) {
        const json& o = j["options"];
        detail::check_keys(o, {"quad_order", "eps_decades", "eps0", "seed", "workers"},
                           "options");
        cfg.quad_order = (int)o.value("quad_order", 16.0);
        cfg.eps_decades = (int)o.value("eps_decades", 8.0);
        cfg.eps0 = o.value("eps0", 0.5);
        cfg.seed = (unsigned)o.value("seed", 1.0);
        cfg.workers = (int)o.value("workers", 1.0);
    }
    for (const char* k : {"ring", "points", "radii", "phi", "hypotheses"})
        if (j.contains(k)) cfg.extra[k] = j[k];
    return cfg;
}

struct ReportBundle {
    json report;
    std::map<std::string, std::string> csv;  // filename -> contents

    void write(const std::filesystem::path& dir) const {
        std::filesystem::create_directories(dir);
        std::ofstream(dir / "report.json") << report.dump(2) << "\n";
        for (const auto& [name, text] : csv) std::ofstream(dir / name) << text;
    }
};

// ---------------------------------------------------------------------------
// Command implementations
// ---------------------------------------------------------------------------

namespace detail {

inline json run_analyze(const JobConfig& cfg, ReportBundle& out) {
    MapSpec spec = parse_map_spec(cfg.subject);
    const int n = map_dimension(spec);
    std::vector<Point> points;
    if (cfg.extra.contains("points")) {
        for (const auto& p : cfg.extra["points"])
            points.push_back(p.get<Point>());
    } else if (cfg.extra.contains("radii")) {
        for (Real r : cfg.extra["radii"].get<std::vector<Real>>()) {
            Point x(n, 0.0);
            x[0] = r;
            points.push_back(x);
        }
    } else {
        throw ValidationError("analyze: needs 'points' or 'radii'");
    }
    json rows = json::array();
    std::ostringstream csv;
    csv << "r,K_I,jac_det_abs,operator_norm,min_stretch\n";
    for (const auto& x : points) {
        DilatationSample s = dilatation_sample(spec, x);
        json row;
        row["point"] = x;
        row["K_I"] = s.K_I;
        row["jac_det_abs"] = s.jac_det_abs;
        row["operator_norm"] = s.operator_norm;
        row["min_stretch"] = s.min_stretch;
        row["singular_values"] = s.sv;
        row["method"] = "Symbolic";
        if (n == 2) {
            PlanarDilatation d = complex_dilatation(spec, x);
            row["K_mu"] = d.K_mu;
            row["mu"] = {d.mu.real(), d.mu.imag()};
        }
        rows.push_back(row);
        csv << format_real(norm(x)) << "," << format_real(s.K_I) << ","
            << format_real(s.jac_det_abs) << "," << format_real(s.operator_norm)
            << "," << format_real(s.min_stretch) << "\n";
    }
    out.csv["trace-analyze.csv"] = csv.str();
    json rep;
    rep["samples"] = rows;
    auto meta = map_metadata(spec);
    rep["metadata"] = {{"bounded", meta.bounded},
                       {"open_discrete_closed", meta.open_discrete_closed},
                       {"multiplicity", meta.multiplicity}};
    return rep;
}

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Diverges: return "Diverges";
        case Verdict::Converges: return "Converges";
        default: return "Inconclusive";
    }
}

inline const char* fmo_verdict_name(FmoVerdict v) {
    switch (v) {
        case FmoVerdict::FMO: return "FMO";
        case FmoVerdict::NotFMO: return "NotFMO";
        default: return "Inconclusive";
    }
}

inline json divergence_to_json(const DivergenceTrace& t) {
    json j;
    j["verdict"] = verdict_name(t.verdict);
    j["method"] = t.method == DivergenceTrace::Symbolic ? "Symbolic" : "Quadrature";
    j["note"] = t.note;
    if (!t.epsilons.empty()) {
        j["epsilons"] = t.epsilons;
        j["integrals"] = t.integrals;
    }
    return j;
}

inline json run_criterion(const JobConfig& cfg, ReportBundle& out) {
    json rep;
    std::string stype = require_string(cfg.subject, "type", "subject");
    bool is_map = stype == "radial" || stype == "twist" || stype == "planar_power" ||
                  stype == "planar_shear";
    std::variant<MapSpec, QField> subject =
        is_map ? std::variant<MapSpec, QField>(parse_map_spec(cfg.subject))
               : std::variant<MapSpec, QField>(parse_qfield(cfg.subject));

    PhiSpec phi = PowerPhi(Real(cfg.n));
    if (cfg.extra.contains("phi")) {
        const json& pj = cfg.extra["phi"];
        check_keys(pj, {"p", "s"}, "phi");
        if (pj.contains("s"))
            phi = PowerLogPhi{require_number(pj, "p", "phi"), pj.value("s", 0.0)};
        else
            phi = PowerPhi(require_number(pj, "p", "phi"));
    }
    HypothesisFlags flags;
    if (cfg.extra.contains("hypotheses")) {
        const json& h = cfg.extra["hypotheses"];
        check_keys(h, {"bounded", "open_discrete_closed", "limit_sets_disjoint"},
                   "hypotheses");
        if (h.contains("bounded")) flags.bounded = h["bounded"].get<bool>();
        if (h.contains("open_discrete_closed"))
            flags.open_discrete_closed = h["open_discrete_closed"].get<bool>();
        if (h.contains("limit_sets_disjoint"))
            flags.limit_sets_disjoint = h["limit_sets_disjoint"].get<bool>();
    }
    VerdictOptions vopts;
    vopts.eps0 = cfg.eps0;
    vopts.decades = cfg.eps_decades;
    CriterionReport cr = removability_verdict(subject, phi, cfg.n, flags, vopts);
    rep["complete"] = cr.complete;
    rep["missing"] = cr.missing;
    rep["hypotheses_used"] = cr.hypotheses_used;
    rep["divergence"] = divergence_to_json(cr.divergence);
    if (cr.calderon)
        rep["calderon"] = {{"holds", cr.calderon->holds},
                           {"conclusive", cr.calderon->conclusive},
                           {"method", cr.calderon->method == CalderonResult::Symbolic
                                          ? "Symbolic"
                                          : "Quadrature"},
                           {"note", cr.calderon->note}};
    rep["extendable_by_theorem"] = cr.extendable_by_theorem;
    if (cr.ground_truth) rep["ground_truth_extendable"] = *cr.ground_truth;
    rep["conclusion"] = cr.conclusion;

    std::ostringstream csv;
    csv << "epsilon,integral,increment\n";
    const auto& t = cr.divergence;
    for (std::size_t i = 0; i < t.epsilons.size(); ++i)
        csv << format_real(t.epsilons[i]) << "," << format_real(t.integrals[i]) << ","
            << format_real(t.increments[i]) << "\n";
    out.csv["trace-criterion.csv"] = csv.str();
    return rep;
}

inline json run_fmo(const JobConfig& cfg, ReportBundle& out) {
    QField q = parse_qfield(cfg.subject);
    FmoTrace t = fmo_classify(q, Point(field_dimension(q), 0.0));
    json rep;
    rep["verdict"] = fmo_verdict_name(t.verdict);
    rep["method"] = "Quadrature";
    rep["epsilons"] = t.epsilons;
    rep["oscillations"] = t.oscillations;
    std::ostringstream csv;
    csv << "epsilon,oscillation\n";
    for (std::size_t i = 0; i < t.epsilons.size(); ++i)
        csv << format_real(t.epsilons[i]) << "," << format_real(t.oscillations[i])
            << "\n";
    out.csv["trace-fmo.csv"] = csv.str();
    return rep;
}

inline json run_modulus(const JobConfig& cfg, ReportBundle& out) {
    if (!cfg.extra.contains("ring"))
        throw ValidationError("modulus: needs 'ring': [r1, r2]");
    auto ring = cfg.extra["ring"].get<std::vector<Real>>();
    if (ring.size() != 2) throw ValidationError("modulus: ring must be [r1, r2]");
    DualityReport d = duality_report(ring[0], ring[1], cfg.n);
    Real oracle = variational_radial_modulus_oracle(ring[0], ring[1], cfg.n, 10000);
    json rep;
    rep["r1"] = ring[0];
    rep["r2"] = ring[1];
    rep["n"] = cfg.n;
    rep["curve_modulus"] = {{"value", d.ring.curve_modulus}, {"method", "Symbolic"}};
    rep["capacity"] = {{"value", d.ring.capacity}, {"method", "Symbolic"}};
    rep["surface_modulus"] = {{"value", d.ring.surface_modulus}, {"method", "Symbolic"}};
    rep["duality_ok"] = d.ok;
    rep["oracle"] = {{"value", oracle}, {"method", "Oracle"}};
    std::ostringstream csv;
    csv << "quantity,value,method\n"
        << "curve_modulus," << format_real(d.ring.curve_modulus) << ",Symbolic\n"
        << "capacity," << format_real(d.ring.capacity) << ",Symbolic\n"
        << "surface_modulus," << format_real(d.ring.surface_modulus) << ",Symbolic\n"
        << "variational_oracle," << format_real(oracle) << ",Oracle\n";
    out.csv["trace-modulus.csv"] = csv.str();
    return rep;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Paper-reproduction suite
// ---------------------------------------------------------------------------

struct SuiteRow {
    std::string name;
    std::string operation;  // owning module operation
    bool pass;
    Real measured;   // worst observed error or the checked value
    Real threshold;  // tolerance it was held to
    std::string method;
};

namespace detail {

inline SuiteRow row_th4_KI(int n) {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<Real> ur(0.05, 0.95);
    std::normal_distribution<Real> gauss;
    Real worst = 0.0;
    for (Real alpha : {0.3, 0.5, 0.9}) {
        MapSpec g = RadialMap(PowerShiftProfile(alpha), n);
        for (int i = 0; i < 40; ++i) {
            Point x(n);
            Real s = 0;
            for (auto& c : x) {
                c = gauss(rng);
                s += c * c;
            }
            Real r = ur(rng);
            for (auto& c : x) c *= r / std::sqrt(s);
            Real expect = std::pow((1 + std::pow(r, alpha)) / (alpha * std::pow(r, alpha)),
                                   n - 1);
            Real got = dilatation_sample(g, x).K_I;
            worst = std::max(worst, std::abs(got - expect) / expect);
        }
    }
    return {"Th4 K_I closed form", "inner_dilatation", worst <= 1e-10, worst, 1e-10,
            "Symbolic"};
}

inline SuiteRow row_th4_Lp(int n) {
    bool ok = true;
    for (Real p : {1.0, 2.0, 5.0}) {
        Real boundary = Real(n) / (p * (n - 1));
        for (Real f : {0.9, 1.1}) {
            Real alpha = f * boundary;
            QField q = FromMapField(RadialMap(PowerShiftProfile(alpha), n), 1.0, 1);
            LpResult r = ball_Lp_norm(q, p, 1.0);
            if (f < 1.0 && !r.finite) ok = false;
            if (f > 1.0 && r.finite) ok = false;
        }
    }
    return {"Th4 L^p threshold", "ball_Lp_norm", ok, ok ? 0.0 : 1.0, 0.0, "Symbolic"};
}

inline SuiteRow row_th4_limit_set(int n) {
    MapSpec g = RadialMap(PowerShiftProfile(0.5), n);
    auto ls = limit_set_at_zero(g);
    const auto* sphere = std::get_if<SphereSetLimit>(&ls);
    bool ok = sphere && std::abs(sphere->radius - 1.0) <= 1e-8;
    Real measured = sphere ? std::abs(sphere->radius - 1.0) : 1.0;
    return {"Th4 limit set = S^{n-1}", "limit_set_at_zero", ok, measured, 1e-8,
            "Quadrature"};
}

inline SuiteRow row_th4_orlicz(int n) {
    MapSpec g = RadialMap(PowerShiftProfile(0.5), n);
    AnnulusSpec region(Point(n, 0.0), 0.5, 0.9);
    auto phi = [](Real t) { return t * t; };
    Real energy = orlicz_energy(g, region, phi);
    // c(G) = sup ||g'|| over the annulus: tangential stretch at r1 dominates
    Real c = profile_value(std::get<RadialMap>(g).profile, region.r1) / region.r1;
    Real vol = unit_ball_volume(n) * (std::pow(region.r2, n) - std::pow(region.r1, n));
    Real bound = Real(n) * c * c * vol;  // phi(sqrt(n) c) m(G)
    bool ok = energy <= bound * (1 + 1e-10);
    return {"Th4 Orlicz energy bound", "orlicz_energy", ok, energy / bound, 1.0,
            "Quadrature"};
}

inline SuiteRow row_th5_KI(int n) {
    PowerLogParams q{2.0, 0.0, Real(n - 1)};
    MapSpec f = RadialMap(ExpIntegralProfile(q, n), n);
    Real worst = 0.0;
    for (Real r : {0.02, 0.1, 0.3, 0.7}) {
        Point x(n, 0.0);
        x[0] = r;
        Real got = dilatation_sample(f, x).K_I;
        worst = std::max(worst, std::abs(got - q(r)) / q(r));
    }
    return {"Th5 K_I = q_0", "inner_dilatation", worst <= 1e-6, worst, 1e-6,
            "Quadrature"};
}

inline SuiteRow row_th5_lemma2(int n) {
    PowerLogParams q{2.0, 0.0, Real(n - 1)};
    MapSpec f = RadialMap(ExpIntegralProfile(q, n), n);
    QField Q = FromMapField(f, 1.0 / Real(n - 1), 1);
    Real worst = 0.0;
    for (Real eps : {1e-1, 1e-2, 1e-3}) {
        LowerQCheck c = lower_Q_check_radial(f, Q, eps, 0.5, n);
        worst = std::max(worst, std::abs(c.gap));
    }
    return {"Th5 Lemma-2 equality", "lower_Q_check_radial", worst <= 1e-6, worst, 1e-6,
            "Quadrature"};
}

inline SuiteRow row_th5_sharpness(int n) {
    // convergent criterion integral: the map must fail to extend
    PowerLogParams q{1.0, 0.0, Real(n)};
    MapSpec f = RadialMap(ExpIntegralProfile(q, n), n);
    bool conv = !power_log_criterion_diverges(q, n);
    bool not_ext = !extendable_ground_truth(f);
    bool ok = conv && not_ext;
    return {"Th5 sharpness (convergent => not extendable)", "extendable_ground_truth",
            ok, ok ? 0.0 : 1.0, 0.0, "Symbolic"};
}

inline SuiteRow row_th1_log_field(int n) {
    QField q = PowerLogField(PowerLogParams{1.0, 0.0, Real(n - 1)}, n);
    HypothesisFlags flags{true, true, true};
    CriterionReport rep = removability_verdict(q, PowerPhi(Real(n)), n, flags);
    bool ok = rep.extendable_by_theorem;
    return {"Th1 verdict, q = log^{n-1}", "removability_verdict", ok, ok ? 0.0 : 1.0,
            0.0, "Symbolic"};
}

inline SuiteRow row_th3_fmo_field(int n) {
    QField q = GenericRadialField{[](Real r) { return std::log(1.0 / r); }, n,
                                  std::nullopt};
    FmoTrace t = fmo_classify(q, Point(n, 0.0));
    bool ok = t.verdict == FmoVerdict::FMO;
    return {"Th3 FMO model field", "fmo_classify", ok, ok ? 0.0 : 1.0, 0.0,
            "Quadrature"};
}

inline SuiteRow row_duality(int n) {
    Real worst = 0.0;
    for (auto [a, b] : {std::pair{1.0, M_E}, {0.3, 0.8}, {2.0, 7.5}}) {
        DualityReport d = duality_report(a, b, n);
        worst = std::max(worst, std::abs(d.cap_vs_curve_gap));
        worst = std::max(worst, std::abs(d.ziemer_gap) / d.ring.surface_modulus);
    }
    return {"Duality triple", "duality_report", worst <= 1e-12, worst, 1e-12,
            "Symbolic"};
}

inline SuiteRow row_eq22(int n) {
    QField q = PowerLogField(PowerLogParams{1.5, 0.5, 1.0}, n);
    AnnulusSpec annulus(Point(n, 0.0), 0.2, 0.7);
    Real width = annulus.r2 - annulus.r1;
    std::vector<RadialFn> candidates = {
        [width](Real) { return 1.0 / width; },
    };
    Eq22Report rep = verify_eq22(q, annulus, n, candidates);
    bool ok = rep.equality_ok && rep.inequality_ok;
    Real measured = std::abs(rep.at_eta0 - rep.equality_value) / rep.equality_value;
    return {"Eq(22) extremality", "verify_eq22", ok, measured, 1e-6, "Quadrature"};
}

}  // namespace detail

// Runs the fixed reproduction suite. Rows are independent and may be computed
// in parallel; assembly order is fixed.
inline std::vector<SuiteRow> reproduce_paper(int n = 3, int workers = 1) {
    std::vector<std::function<SuiteRow()>> tasks = {
        [n] { return detail::row_th4_KI(n); },
        [n] { return detail::row_th4_Lp(n); },
        [n] { return detail::row_th4_limit_set(n); },
        [n] { return detail::row_th4_orlicz(n); },
        [n] { return detail::row_th5_KI(n); },
        [n] { return detail::row_th5_lemma2(n); },
        [n] { return detail::row_th5_sharpness(n); },
        [n] { return detail::row_th1_log_field(n); },
        [n] { return detail::row_th3_fmo_field(n); },
        [n] { return detail::row_duality(n); },
        [n] { return detail::row_eq22(n); },
    };
    std::vector<SuiteRow> rows(tasks.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) rows[i] = tasks[i]();
        return rows;
    }
    std::vector<std::future<SuiteRow>> futures;
    std::size_t next = 0;
    while (next < tasks.size()) {
        std::size_t batch = std::min<std::size_t>(workers, tasks.size() - next);
        futures.clear();
        for (std::size_t i = 0; i < batch; ++i)
            futures.push_back(std::async(std::launch::async, tasks[next + i]));
        for (std::size_t i = 0; i < batch; ++i) rows[next + i] = futures[i].get();
        next += batch;
    }
    return rows;
}

inline std::string suite_csv(const std::vector<SuiteRow>& rows) {
    std::ostringstream csv;
    csv << "row,name,operation,status,measured,threshold,method\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        csv << i << "," << r.name << "," << r.operation << ","
            << (r.pass ? "pass" : "FAIL") << "," << format_real(r.measured) << ","
            << format_real(r.threshold) << "," << r.method << "\n";
    }
    return csv.str();
}

// ---------------------------------------------------------------------------
// Job runner
// ---------------------------------------------------------------------------

inline ReportBundle run_job(const JobConfig& cfg) {
    ReportBundle out;
    json rep;
    rep["command"] = cfg.command;
    rep["n"] = cfg.n;
    if (cfg.command == "analyze")
        rep["result"] = detail::run_analyze(cfg, out);
    else if (cfg.command == "criterion")
        rep["result"] = detail::run_criterion(cfg, out);
    else if (cfg.command == "fmo")
        rep["result"] = detail::run_fmo(cfg, out);
    else if (cfg.command == "modulus")
        rep["result"] = detail::run_modulus(cfg, out);
    else {
        auto rows = reproduce_paper(cfg.n, cfg.workers);
        json jrows = json::array();
        bool all = true;
        for (const auto& r : rows) {
            jrows.push_back({{"name", r.name},
                             {"operation", r.operation},
                             {"pass", r.pass},
                             {"measured", r.measured},
                             {"threshold", r.threshold},
                             {"method", r.method}});
            all = all && r.pass;
        }
        rep["result"] = {{"rows", jrows}, {"all_pass", all}};
        out.csv["trace-reproduce.csv"] = suite_csv(rows);
    }
    out.report = rep;
    return out;
}

}  // namespace fdtk
