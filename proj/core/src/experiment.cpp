#include "glpin/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "glpin/errors.hpp"
#include "glpin/field_io.hpp"
#include "glpin/phase.hpp"
#include "glpin/test_functions.hpp"

namespace glpin {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {
constexpr double kPi = std::numbers::pi;

void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                 const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
    }
}

template <class T>
T get_req(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("missing key \"" + std::string(key) + "\" in " + where);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
    }
}

json qty(double value, const char* unit, const char* formula) {
    return json{{"value", value}, {"unit", unit}, {"formula", formula}};
}

std::vector<BoundaryMode> parse_modes(const json& arr, const std::string& where) {
    std::vector<BoundaryMode> modes;
    for (const auto& m : arr) {
        expect_keys(m, {"n", "cos", "sin"}, where);
        BoundaryMode bm;
        bm.n = get_req<int>(m, "n", where);
        if (bm.n < 1) throw ConfigError("mode index must be >= 1 in " + where);
        bm.amp_cos = get_or<double>(m, "cos", 0.0);
        bm.amp_sin = get_or<double>(m, "sin", 0.0);
        modes.push_back(bm);
    }
    return modes;
}

json modes_to_json(const std::vector<BoundaryMode>& modes) {
    json arr = json::array();
    for (const auto& m : modes)
        arr.push_back(json{{"n", m.n}, {"cos", m.amp_cos}, {"sin", m.amp_sin}});
    return arr;
}

} // namespace

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

double DeltaRule::delta_for(double eps, double fixed_delta) const {
    switch (kind) {
        case Kind::Fixed: return fixed_delta;
        case Kind::Power: return std::pow(eps, q);
        case Kind::ExpQuarter: return std::exp(-std::pow(std::abs(std::log(eps)), 0.25));
    }
    return fixed_delta;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    expect_keys(j,
                {"schema", "domain", "pinning", "boundary", "ladder", "solver",
                 "prediction_grid_n", "output", "seed", "threads"},
                "config");
    const std::string schema = get_req<std::string>(j, "schema", "config");
    if (schema != "glpin-config-v1")
        throw ConfigError("unsupported config schema: " + schema);

    ExperimentConfig cfg;

    const json& jd = j.at("domain");
    expect_keys(jd, {"kind", "extent", "n"}, "domain");
    const std::string kind = get_req<std::string>(jd, "kind", "domain");
    const auto extent = get_req<std::vector<double>>(jd, "extent", "domain");
    cfg.domain.n = get_req<int>(jd, "n", "domain");
    if (kind == "unit-disc") {
        cfg.domain.kind = DomainSpec::Kind::UnitDisc;
        if (extent.size() != 1) throw ConfigError("unit-disc extent must be [diameter]");
        cfg.domain.lx = cfg.domain.ly = extent[0];
    } else if (kind == "rectangle") {
        cfg.domain.kind = DomainSpec::Kind::Rectangle;
        if (extent.size() != 2) throw ConfigError("rectangle extent must be [lx, ly]");
        cfg.domain.lx = extent[0];
        cfg.domain.ly = extent[1];
    } else {
        throw ConfigError("domain kind must be unit-disc or rectangle");
    }

    const json& jp = j.at("pinning");
    expect_keys(jp, {"centers", "shape", "contrast", "delta", "eps"}, "pinning");
    for (const auto& c : get_req<std::vector<std::vector<double>>>(jp, "centers", "pinning")) {
        if (c.size() != 2) throw ConfigError("each center must be [x, y]");
        cfg.pinning.centers.push_back({c[0], c[1]});
    }
    const json& js = jp.at("shape");
    expect_keys(js, {"kind", "radius", "vertices"}, "pinning.shape");
    const std::string sk = get_req<std::string>(js, "kind", "pinning.shape");
    if (sk == "disc") {
        cfg.pinning.shape = InclusionShape::disc(get_or<double>(js, "radius", 0.5));
    } else if (sk == "polygon") {
        std::vector<Vec2> vs;
        for (const auto& v :
             get_req<std::vector<std::vector<double>>>(js, "vertices", "pinning.shape")) {
            if (v.size() != 2) throw ConfigError("each vertex must be [x, y]");
            vs.push_back({v[0], v[1]});
        }
        cfg.pinning.shape = InclusionShape::polygon(std::move(vs));
    } else {
        throw ConfigError("shape kind must be disc or polygon");
    }
    cfg.pinning.contrast = get_req<double>(jp, "contrast", "pinning");
    cfg.pinning.delta = get_req<double>(jp, "delta", "pinning");
    cfg.pinning.eps = get_req<double>(jp, "eps", "pinning");

    const json& jb = j.at("boundary");
    expect_keys(jb, {"degree", "phase_modes", "modulus_modes"}, "boundary");
    cfg.boundary.degree = get_req<int>(jb, "degree", "boundary");
    if (cfg.boundary.degree < 0) throw ConfigError("boundary degree must be >= 0");
    if (jb.contains("phase_modes"))
        cfg.boundary.phase_modes = parse_modes(jb.at("phase_modes"), "boundary.phase_modes");
    if (jb.contains("modulus_modes"))
        cfg.boundary.modulus_modes =
            parse_modes(jb.at("modulus_modes"), "boundary.modulus_modes");

    if (j.contains("ladder")) {
        const json& jl = j.at("ladder");
        expect_keys(jl, {"eps", "delta_rule"}, "ladder");
        cfg.eps_ladder = get_or<std::vector<double>>(jl, "eps", {});
        if (jl.contains("delta_rule")) {
            const json& jr = jl.at("delta_rule");
            expect_keys(jr, {"kind", "q"}, "ladder.delta_rule");
            const std::string rk = get_req<std::string>(jr, "kind", "ladder.delta_rule");
            if (rk == "fixed") cfg.delta_rule.kind = DeltaRule::Kind::Fixed;
            else if (rk == "power") cfg.delta_rule.kind = DeltaRule::Kind::Power;
            else if (rk == "exp-quarter") cfg.delta_rule.kind = DeltaRule::Kind::ExpQuarter;
            else throw ConfigError("delta_rule kind must be fixed, power or exp-quarter");
            cfg.delta_rule.q = get_or<double>(jr, "q", 1.0 / 3.0);
            if (cfg.delta_rule.kind == DeltaRule::Kind::Power &&
                !(cfg.delta_rule.q > 0.0 && cfg.delta_rule.q < 1.0))
                throw ConfigError("delta_rule power exponent must lie in (0,1)");
        }
    }

    if (j.contains("solver")) {
        const json& jo = j.at("solver");
        expect_keys(jo, {"max_iter", "multistart", "tol_rel_energy", "tol_grad"}, "solver");
        cfg.solver.max_iter = get_or<long>(jo, "max_iter", cfg.solver.max_iter);
        cfg.solver.multistart = get_or<int>(jo, "multistart", cfg.solver.multistart);
        cfg.solver.tol_rel_energy =
            get_or<double>(jo, "tol_rel_energy", cfg.solver.tol_rel_energy);
        cfg.solver.tol_grad = get_or<double>(jo, "tol_grad", cfg.solver.tol_grad);
        if (cfg.solver.multistart < 1 || cfg.solver.multistart > 3)
            throw ConfigError("solver.multistart must be 1, 2 or 3");
    }
    cfg.prediction_grid_n = get_or<int>(j, "prediction_grid_n", cfg.prediction_grid_n);
    if (j.contains("output")) {
        const json& jo = j.at("output");
        expect_keys(jo, {"dir"}, "output");
        cfg.out_dir = get_or<std::string>(jo, "dir", cfg.out_dir);
    }
    cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
    cfg.threads = get_or<int>(j, "threads", 1);
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");

    // eagerly validate geometry and scales
    GridPtr grid = cfg.domain.build();
    cfg.pinning.validate(*grid);
    cfg.boundary.validate(cfg.pinning.eps);
    for (double e : cfg.eps_ladder) {
        const double dl = cfg.delta_rule.delta_for(e, cfg.pinning.delta);
        if (!(e / dl > 0.0 && e / dl < 1.0))
            throw ConfigError("ladder rung violates xi = eps/delta in (0,1)");
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return from_json_text(ss.str());
}

namespace {
json domain_pinning_json(const ExperimentConfig& cfg) {
    json jd;
    jd["kind"] = cfg.domain.kind == DomainSpec::Kind::UnitDisc ? "unit-disc" : "rectangle";
    if (cfg.domain.kind == DomainSpec::Kind::UnitDisc)
        jd["extent"] = json::array({cfg.domain.lx});
    else
        jd["extent"] = json::array({cfg.domain.lx, cfg.domain.ly});
    jd["n"] = cfg.domain.n;

    json jp;
    json centers = json::array();
    for (const auto& c : cfg.pinning.centers) centers.push_back(json::array({c.x, c.y}));
    jp["centers"] = centers;
    if (cfg.pinning.shape.kind == InclusionShape::Kind::Disc) {
        jp["shape"] = json{{"kind", "disc"}, {"radius", cfg.pinning.shape.radius}};
    } else {
        json vs = json::array();
        for (const auto& v : cfg.pinning.shape.vertices) vs.push_back(json::array({v.x, v.y}));
        jp["shape"] = json{{"kind", "polygon"}, {"vertices", vs}};
    }
    jp["contrast"] = cfg.pinning.contrast;
    jp["delta"] = cfg.pinning.delta;
    jp["eps"] = cfg.pinning.eps;
    return json{{"domain", jd}, {"pinning", jp}};
}
} // namespace

std::string ExperimentConfig::canonical_json() const {
    json j = domain_pinning_json(*this);
    j["schema"] = "glpin-config-v1";
    j["boundary"] = json{{"degree", boundary.degree},
                         {"phase_modes", modes_to_json(boundary.phase_modes)},
                         {"modulus_modes", modes_to_json(boundary.modulus_modes)}};
    json jl;
    jl["eps"] = eps_ladder;
    const char* rk = delta_rule.kind == DeltaRule::Kind::Fixed
                         ? "fixed"
                         : (delta_rule.kind == DeltaRule::Kind::Power ? "power" : "exp-quarter");
    jl["delta_rule"] = json{{"kind", rk}, {"q", delta_rule.q}};
    j["ladder"] = jl;
    j["solver"] = json{{"max_iter", solver.max_iter},
                       {"multistart", solver.multistart},
                       {"tol_rel_energy", solver.tol_rel_energy},
                       {"tol_grad", solver.tol_grad}};
    j["prediction_grid_n"] = prediction_grid_n;
    j["output"] = json{{"dir", out_dir}};
    j["seed"] = seed;
    j["threads"] = threads;
    return j.dump();
}

std::string ExperimentConfig::config_hash() const { return fnv1a_hex(canonical_json()); }

std::string ExperimentConfig::pinning_hash() const {
    return fnv1a_hex(domain_pinning_json(*this).dump());
}

std::string ExperimentConfig::boundary_signature() const {
    json jb = json{{"degree", boundary.degree},
                   {"phase_modes", modes_to_json(boundary.phase_modes)},
                   {"modulus_modes", modes_to_json(boundary.modulus_modes)}};
    return jb.dump();
}

// ----------------------------------------------------------------- running

namespace {

SeedPlan make_seed_plan(const ExperimentConfig& cfg, const GridPtr& grid) {
    SeedPlan plan;
    const int d = cfg.boundary.degree;
    const int M = cfg.pinning.count();
    if (d == 0 || M == 0) return plan;

    std::vector<int> indices;
    std::vector<int> degrees;
    if (M >= d) {
        // quick renormalized-energy ranking of the d-subsets
        WgOptions wo;
        wo.grid_n = cfg.prediction_grid_n;
        wo.rho_ladder = {0.08, 0.05};
        try {
            SelectionResult sel = select_inclusions(cfg.domain, cfg.boundary, cfg.pinning,
                                                    d, wo);
            indices = sel.optima.front().indices;
            degrees = sel.optima.front().degrees;
        } catch (const std::exception&) {
            for (int i = 0; i < d; ++i) indices.push_back(i);
            degrees.assign(d, 1);
        }
    } else {
        WgOptions wo;
        wo.grid_n = cfg.prediction_grid_n;
        wo.rho_ladder = {0.08, 0.05};
        try {
            SelectionResult sel = select_inclusions(cfg.domain, cfg.boundary, cfg.pinning,
                                                    d, wo);
            indices = sel.optima.front().indices;
            degrees = sel.optima.front().degrees;
        } catch (const std::exception&) {
            const auto opt = discrete_optimizer(M, d, std::log(cfg.pinning.delta),
                                                std::log(cfg.pinning.xi()),
                                                cfg.pinning.contrast);
            for (int i = 0; i < M; ++i) indices.push_back(i);
            degrees = opt.front().degrees;
            std::sort(degrees.rbegin(), degrees.rend());
        }
    }
    for (size_t k = 0; k < indices.size(); ++k) {
        const Vec2 a = cfg.pinning.centers[indices[k]];
        for (const Vec2& s : reference_sites(cfg.pinning.shape, degrees[k]))
            plan.vortices.push_back(
                {a.x + s.x * cfg.pinning.delta + 0.31 * grid->h,
                 a.y + s.y * cfg.pinning.delta + 0.17 * grid->h});
    }
    return plan;
}

RungResult run_rung(const ExperimentConfig& cfg, const GridPtr& grid, double eps,
                    double delta, const SeedPlan& plan, std::uint64_t rung_seed,
                    ScalarField* out_U, ComplexField* out_v, ScalarField* out_a) {
    const auto t0 = std::chrono::steady_clock::now();
    RungResult r;
    r.eps = eps;
    r.delta = delta;
    r.xi = eps / delta;
    r.scales = ScaleDiagnostics::from(eps, delta);

    const PinningConfig pin = cfg.pinning.with_scales(eps, delta);
    ScalarField a = build_pinning_field(pin, grid);

    SpecialSolution su = solve_U(pin, grid);
    r.E_of_U = su.energy.total;
    r.u_iterations = su.iterations;

    SolverOptions so = cfg.solver;
    so.rng_seed = cfg.seed * 0x9e3779b97f4a7c15ULL + rung_seed + 0x51ULL;
    SolveResult res = minimize_F(su.U, cfg.boundary, eps, plan, so, pin.contrast);
    r.F = res.energy;
    r.solver_iterations = res.iterations;
    r.solver_residual = res.final_grad_residual;
    r.seed_name = res.seed_name;

    r.subst_residual = substitution_residual(su.U, res.v, a, eps);
    r.zeros = find_zeros(res.v, &pin);
    for (const Zero& z : r.zeros.zeros) {
        const int i = z.inclusion >= 0 ? z.inclusion : 0;
        r.offsets.push_back((z.pos - pin.centers[i]) / delta);
    }
    r.floor = modulus_floor_report(res.v, pin, 2.0 * delta);

    BadDiscSet bd = classify_bad_discs(res.v, su.U, eps);
    r.bad_count = bd.bad_count();
    r.separated_count = static_cast<int>(bd.separated.size());
    r.bad_lambda = bd.lambda;

    if (out_U) *out_U = std::move(su.U);
    if (out_v) *out_v = std::move(res.v);
    if (out_a) *out_a = std::move(a);
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

json rung_to_json(const RungResult& r) {
    json j;
    j["eps"] = r.eps;
    j["delta"] = r.delta;
    j["xi"] = r.xi;
    j["hypothesis_ratio"] = json{{"value", r.scales.hypothesis_ratio},
                                 {"unit", "dimensionless"},
                                 {"formula", "|ln delta|^3 / |ln eps|"},
                                 {"warning", r.scales.separation_warning}};
    j["energy_F"] = qty(r.F.total, "dimensionless",
                        "(1/2) int U^2 |grad v|^2 + (1/(4 eps^2)) int U^4 (1-|v|^2)^2");
    j["energy_F_gradient"] = qty(r.F.gradient, "dimensionless", "(1/2) int U^2 |grad v|^2");
    j["energy_F_potential"] =
        qty(r.F.potential, "dimensionless", "(1/(4 eps^2)) int U^4 (1-|v|^2)^2");
    j["energy_E_of_U"] = qty(r.E_of_U, "dimensionless",
                             "(1/2) int |grad U|^2 + (1/(4 eps^2)) int (a^2-U^2)^2");
    j["substitution_residual"] =
        qty(r.subst_residual, "dimensionless", "|E(Uv) - E(U) - F(v)| / max(1, E(Uv))");
    j["solver"] = json{{"u_iterations", r.u_iterations},
                       {"iterations", r.solver_iterations},
                       {"residual", r.solver_residual},
                       {"seed", r.seed_name}};
    json zeros = json::array();
    for (size_t k = 0; k < r.zeros.zeros.size(); ++k) {
        const Zero& z = r.zeros.zeros[k];
        zeros.push_back(json{{"x", z.pos.x},
                             {"y", z.pos.y},
                             {"winding", z.winding},
                             {"inclusion", z.inclusion},
                             {"offset_x", r.offsets[k].x},
                             {"offset_y", r.offsets[k].y}});
    }
    j["zeros"] = zeros;
    j["total_winding"] = r.zeros.total_winding;
    j["all_inside_pinning"] = r.zeros.all_inside_pinning();
    j["all_windings_one"] = r.zeros.all_windings_one();
    j["modulus_floor"] = qty(r.floor.floor, "dimensionless", "min |v| outside B(a_i, 2 delta)");
    j["modulus_floor_scaled"] =
        qty(r.floor.scaled, "dimensionless", "(1 - floor) |ln eps|^(1/3)");
    j["bad_discs"] = json{{"count", r.bad_count},
                          {"separated", r.separated_count},
                          {"lambda", r.bad_lambda}};
    json warnings = json::array();
    for (const auto& w : r.zeros.warnings) warnings.push_back(w);
    j["warnings"] = warnings;
    return j;
}

json fit_to_json(const SweepFit& f) {
    json j;
    j["basis"] = f.basis;
    json co;
    for (const auto& [k, v] : f.coefficients)
        co[k] = qty(v, "dimensionless", ("least-squares coefficient of " + k).c_str());
    for (const auto& [k, v] : f.predicted)
        co["predicted_" + k] =
            qty(v, "dimensionless",
                k == "abs_ln_eps" ? "pi*d*b^2"
                                  : "pi*(1-b^2)*d (unit degrees) or pi*(sum d_i^2 - d*b^2)");
    j["coefficients"] = co;
    j["warnings"] = f.warnings;
    return j;
}

std::string record_json(const RunRecord& rec) {
    json j;
    j["schema"] = "glpin-record-v1";
    j["mode"] = rec.mode;
    j["case"] = rec.case_label;
    j["config_hash"] = rec.config_hash;
    j["pinning_hash"] = rec.pinning_hash;
    j["boundary"] = json::parse(rec.boundary_sig);
    j["config"] = json::parse(rec.config_canonical);
    json rungs = json::array();
    for (const auto& r : rec.rungs) rungs.push_back(rung_to_json(r));
    j["rungs"] = rungs;
    if (rec.fit) j["fit"] = fit_to_json(*rec.fit);
    return j.dump(2) + "\n";
}

void persist(const ExperimentConfig& cfg, const RunRecord& rec, RunOutput& out,
             const std::vector<ScalarField>& Us, const std::vector<ComplexField>& vs,
             const std::vector<ScalarField>& as) {
    const fs::path dir = fs::path(cfg.out_dir) / rec.config_hash;
    fs::create_directories(dir / "fields");
    fs::create_directories(dir / "tables");
    {
        std::ofstream os(dir / "record.json", std::ios::binary);
        os << rec.to_json();
    }
    {
        json t;
        t["wall_seconds_per_rung"] = json::array();
        for (const auto& r : rec.rungs) t["wall_seconds_per_rung"].push_back(r.wall_seconds);
        std::ofstream os(dir / "timings.json");
        os << t.dump(2) << "\n";
    }
    for (size_t k = 0; k < rec.rungs.size(); ++k) {
        const std::string tag = "rung" + std::to_string(k);
        if (k < Us.size() && Us[k].grid) save_field(Us[k], (dir / "fields" / (tag + "_U.bin")).string());
        if (k < vs.size() && vs[k].grid) save_field(vs[k], (dir / "fields" / (tag + "_v.bin")).string());
        if (k < as.size() && as[k].grid) save_field(as[k], (dir / "fields" / (tag + "_a.bin")).string());
    }
    std::ofstream zs(dir / "tables" / "zeros.csv");
    zs << "rung,x,y,winding,inclusion,offset_x,offset_y\n";
    zs.precision(17);
    for (size_t k = 0; k < rec.rungs.size(); ++k)
        for (size_t zi = 0; zi < rec.rungs[k].zeros.zeros.size(); ++zi) {
            const Zero& z = rec.rungs[k].zeros.zeros[zi];
            zs << k << ',' << z.pos.x << ',' << z.pos.y << ',' << z.winding << ','
               << z.inclusion << ',' << rec.rungs[k].offsets[zi].x << ','
               << rec.rungs[k].offsets[zi].y << '\n';
        }
    out.dir = dir.string();
}

} // namespace

std::string RunRecord::to_json() const { return record_json(*this); }

RunOutput cmd_solve(const ExperimentConfig& cfg, bool persist_out) {
    GridPtr grid = cfg.domain.build();
    cfg.pinning.validate(*grid);
    cfg.boundary.validate(cfg.pinning.eps);

    RunOutput out;
    out.record.mode = "solve";
    const int M = cfg.pinning.count(), d = cfg.boundary.degree;
    out.record.case_label = d == 0 || M == 0 ? "none" : (M >= d ? "I" : "II");
    out.record.config_hash = cfg.config_hash();
    out.record.pinning_hash = cfg.pinning_hash();
    out.record.boundary_sig = cfg.boundary_signature();
    out.record.config_canonical = cfg.canonical_json();

    const SeedPlan plan = make_seed_plan(cfg, grid);
    std::vector<ScalarField> Us(1);
    std::vector<ComplexField> vs(1);
    std::vector<ScalarField> as(1);
    out.record.rungs.push_back(run_rung(cfg, grid, cfg.pinning.eps, cfg.pinning.delta, plan,
                                        0, &Us[0], &vs[0], &as[0]));
    if (persist_out) persist(cfg, out.record, out, Us, vs, as);
    return out;
}

SweepFit fit_sweep(const std::vector<double>& eps, const std::vector<double>& delta,
                   const std::vector<double>& F_total, const ExperimentConfig& cfg) {
    SweepFit fit;
    const size_t m = eps.size();
    std::vector<double> le(m), ld(m);
    for (size_t k = 0; k < m; ++k) {
        le[k] = std::abs(std::log(eps[k]));
        ld[k] = std::abs(std::log(delta[k]));
    }
    double ldmin = *std::min_element(ld.begin(), ld.end());
    double ldmax = *std::max_element(ld.begin(), ld.end());
    const bool delta_const = (ldmax - ldmin) < 1e-12;
    if (delta_const)
        fit.warnings.push_back(
            "delta constant along the ladder: |ln delta| column folded into the intercept");

    const int cols = delta_const ? 2 : 3;
    fit.basis = delta_const ? std::vector<std::string>{"abs_ln_eps", "const"}
                            : std::vector<std::string>{"abs_ln_eps", "abs_ln_delta", "const"};
    // normal equations
    std::vector<std::vector<double>> A(cols, std::vector<double>(cols, 0.0));
    std::vector<double> rhs(cols, 0.0);
    for (size_t k = 0; k < m; ++k) {
        std::vector<double> row{le[k], delta_const ? 1.0 : ld[k]};
        if (!delta_const) row.push_back(1.0);
        for (int i = 0; i < cols; ++i) {
            rhs[i] += row[i] * F_total[k];
            for (int j = 0; j < cols; ++j) A[i][j] += row[i] * row[j];
        }
    }
    // gaussian elimination
    for (int i = 0; i < cols; ++i) {
        int piv = i;
        for (int k = i + 1; k < cols; ++k)
            if (std::abs(A[k][i]) > std::abs(A[piv][i])) piv = k;
        std::swap(A[i], A[piv]);
        std::swap(rhs[i], rhs[piv]);
        for (int k = i + 1; k < cols; ++k) {
            const double f = A[k][i] / A[i][i];
            for (int j = i; j < cols; ++j) A[k][j] -= f * A[i][j];
            rhs[k] -= f * rhs[i];
        }
    }
    std::vector<double> coef(cols);
    for (int i = cols - 1; i >= 0; --i) {
        double s = rhs[i];
        for (int j = i + 1; j < cols; ++j) s -= A[i][j] * coef[j];
        coef[i] = s / A[i][i];
    }
    for (int i = 0; i < cols; ++i) fit.coefficients[fit.basis[i]] = coef[i];

    const int M = cfg.pinning.count(), d = cfg.boundary.degree;
    const double b = cfg.pinning.contrast;
    if (d > 0 && M > 0) {
        fit.predicted["abs_ln_eps"] = kPi * d * b * b;
        if (M >= d) {
            fit.predicted["abs_ln_delta"] = kPi * (1.0 - b * b) * d;
        } else {
            const auto opt = discrete_optimizer(M, d, std::log(cfg.pinning.delta),
                                                std::log(cfg.pinning.xi()), b);
            fit.predicted["abs_ln_delta"] =
                kPi * (opt.front().sum_squares() - d * b * b);
        }
    }
    return fit;
}

RunOutput cmd_sweep(const ExperimentConfig& cfg, bool persist_out) {
    if (cfg.eps_ladder.size() < 3)
        throw ConfigError("cmd_sweep requires an eps ladder with >= 3 rungs");
    GridPtr grid = cfg.domain.build();

    RunOutput out;
    out.record.mode = "sweep";
    const int M = cfg.pinning.count(), d = cfg.boundary.degree;
    out.record.case_label = d == 0 || M == 0 ? "none" : (M >= d ? "I" : "II");
    out.record.config_hash = cfg.config_hash();
    out.record.pinning_hash = cfg.pinning_hash();
    out.record.boundary_sig = cfg.boundary_signature();
    out.record.config_canonical = cfg.canonical_json();

    const SeedPlan plan = make_seed_plan(cfg, grid);
    const size_t m = cfg.eps_ladder.size();
    out.record.rungs.resize(m);
    std::vector<ScalarField> Us(m);
    std::vector<ComplexField> vs(m);
    std::vector<ScalarField> as(m);

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t k = next.fetch_add(1);
            if (k >= m) return;
            const double eps = cfg.eps_ladder[k];
            const double delta = cfg.delta_rule.delta_for(eps, cfg.pinning.delta);
            out.record.rungs[k] =
                run_rung(cfg, grid, eps, delta, plan, k, &Us[k], &vs[k], &as[k]);
        }
    };
    const int nworkers = std::max(1, std::min<int>(cfg.threads, static_cast<int>(m)));
    if (nworkers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nworkers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<double> es, ds, Fs;
    for (const auto& r : out.record.rungs) {
        es.push_back(r.eps);
        ds.push_back(r.delta);
        Fs.push_back(r.F.total);
    }
    out.record.fit = fit_sweep(es, ds, Fs, cfg);
    if (persist_out) persist(cfg, out.record, out, Us, vs, as);
    return out;
}

// ----------------------------------------------------------------- predict

std::vector<Vec2> optimal_offsets(int d0, double b, const InclusionShape& omega,
                                  int grid_n) {
    TildeW2Options wo;
    wo.grid_n = grid_n;
    wo.r_ladder = {0.05, 0.035};
    BoundaryData radial = BoundaryData::pure(d0);

    std::vector<Vec2> x = reference_sites(omega, d0, 0.5);
    auto eval = [&](const std::vector<Vec2>& pts) -> double {
        try {
            return extract_tildeW2(pts, radial, b, omega, wo).value;
        } catch (const std::exception&) {
            return 1e300; // infeasible placement
        }
    };
    double fx = eval(x);
    double step = 0.08;
    const double min_step = 5e-3;
    int rounds = 0;
    while (step >= min_step && rounds < 60) {
        ++rounds;
        bool improved = false;
        for (size_t k = 0; k < x.size() && !improved; ++k) {
            const Vec2 dirs[4] = {{step, 0}, {-step, 0}, {0, step}, {0, -step}};
            for (const Vec2& dd : dirs) {
                std::vector<Vec2> xt = x;
                xt[k] = xt[k] + dd;
                const double ft = eval(xt);
                if (ft < fx - 1e-10) {
                    x = std::move(xt);
                    fx = ft;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return x;
}

PredictRecord cmd_predict(const ExperimentConfig& cfg) {
    const int M = cfg.pinning.count(), d = cfg.boundary.degree;
    if (M < 1 || d < 1) throw ConfigError("cmd_predict requires M >= 1 and d >= 1");

    PredictRecord rec;
    rec.config_hash = cfg.config_hash();
    rec.optimizer_optima = discrete_optimizer(M, d, std::log(cfg.pinning.delta),
                                              std::log(cfg.pinning.xi()),
                                              cfg.pinning.contrast);
    WgOptions wo;
    wo.grid_n = std::max(cfg.prediction_grid_n, 256);
    rec.selection = select_inclusions(cfg.domain, cfg.boundary, cfg.pinning, d, wo);

    std::vector<int> distinct;
    for (int di : rec.selection.optima.front().degrees)
        if (di > 0 && std::find(distinct.begin(), distinct.end(), di) == distinct.end())
            distinct.push_back(di);
    for (int di : distinct)
        rec.offsets_by_degree[di] =
            optimal_offsets(di, cfg.pinning.contrast, cfg.pinning.shape);
    return rec;
}

std::string PredictRecord::to_json() const {
    json j;
    j["config_hash"] = config_hash;
    json opt = json::array();
    for (const auto& c : optimizer_optima) opt.push_back(c.degrees);
    j["optimizer_optima"] = opt;
    j["optimizer_formula"] = "argmin pi sum d_i^2 |ln delta| + pi b^2 sum |d_i| |ln xi|";
    json all = json::array(), best = json::array();
    auto sel_to_json = [](const Selection& s) {
        return json{{"indices", s.indices},
                    {"degrees", s.degrees},
                    {"Wg", {{"value", s.Wg},
                            {"unit", "dimensionless"},
                            {"formula", "I_rho - pi sum(d_i^2) |ln rho|, extrapolated"}}}};
    };
    for (const auto& s : selection.all) all.push_back(sel_to_json(s));
    for (const auto& s : selection.optima) best.push_back(sel_to_json(s));
    j["candidates"] = all;
    j["optima"] = best;
    json off;
    for (const auto& [deg, pts] : offsets_by_degree) {
        json arr = json::array();
        for (const auto& p : pts) arr.push_back(json::array({p.x, p.y}));
        off[std::to_string(deg)] = arr;
    }
    j["offsets_by_degree"] = off;
    j["offsets_formula"] = "argmin of the local renormalized energy, radial trace";
    return j.dump(2) + "\n";
}

// ----------------------------------------------------------------- verify

VerifyReport cmd_verify(const std::vector<std::string>& record_paths, double threshold) {
    if (record_paths.size() < 2)
        throw ConfigError("cmd_verify requires at least two record paths");
    struct Rec {
        std::string pinning_hash, boundary;
        std::vector<std::pair<int, Vec2>> offsets; // inclusion, rescaled offset
    };
    std::vector<Rec> recs;
    for (const auto& path : record_paths) {
        std::ifstream is(path);
        if (!is) throw ConfigError("cannot open record: " + path);
        json j;
        try {
            j = json::parse(is);
        } catch (const json::exception& e) {
            throw ConfigError("record is not valid JSON: " + path + ": " + e.what());
        }
        Rec r;
        r.pinning_hash = j.at("pinning_hash").get<std::string>();
        r.boundary = j.at("boundary").dump();
        const json& rung = j.at("rungs").back();
        for (const auto& z : rung.at("zeros"))
            r.offsets.push_back({z.at("inclusion").get<int>(),
                                 Vec2{z.at("offset_x").get<double>(),
                                      z.at("offset_y").get<double>()}});
        recs.push_back(std::move(r));
    }
    VerifyReport rep;
    rep.records = static_cast<int>(recs.size());
    rep.threshold = threshold;
    for (size_t k = 1; k < recs.size(); ++k) {
        if (recs[k].pinning_hash != recs[0].pinning_hash)
            throw ConfigError("records have different pinning configurations");
        if (recs[k].boundary != recs[0].boundary) rep.boundary_differs = true;
    }
    for (size_t a = 0; a < recs.size(); ++a)
        for (size_t b = a + 1; b < recs.size(); ++b) {
            if (recs[a].offsets.size() != recs[b].offsets.size()) {
                rep.notes.push_back("zero counts differ between records");
                rep.max_offset_distance = std::max(rep.max_offset_distance, 2.0);
                continue;
            }
            // greedy nearest matching within the same inclusion
            std::vector<bool> used(recs[b].offsets.size(), false);
            for (const auto& [inc, off] : recs[a].offsets) {
                double bestd = 1e300;
                int besti = -1;
                for (size_t i = 0; i < recs[b].offsets.size(); ++i) {
                    if (used[i] || recs[b].offsets[i].first != inc) continue;
                    const double dd = dist(off, recs[b].offsets[i].second);
                    if (dd < bestd) {
                        bestd = dd;
                        besti = static_cast<int>(i);
                    }
                }
                if (besti < 0) {
                    rep.notes.push_back("unmatched zero (inclusion sets differ)");
                    rep.max_offset_distance = std::max(rep.max_offset_distance, 2.0);
                } else {
                    used[besti] = true;
                    rep.max_offset_distance = std::max(rep.max_offset_distance, bestd);
                }
            }
        }
    rep.within_threshold = rep.max_offset_distance <= threshold;
    return rep;
}

std::string VerifyReport::to_json() const {
    json j;
    j["records"] = records;
    j["boundary_differs"] = boundary_differs;
    j["max_offset_distance"] = qty(max_offset_distance, "omega units",
                                   "max over matched zeros of |offset_a - offset_b|");
    j["threshold"] = threshold;
    j["within_threshold"] = within_threshold;
    j["notes"] = notes;
    return j.dump(2) + "\n";
}

} // namespace glpin
