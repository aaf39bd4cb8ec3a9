// Command line front end: solve / sweep / predict / verify / renorm.
// Exit codes: 0 success, 2 configuration or schema error, 3 solver failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "glpin/errors.hpp"
#include "glpin/experiment.hpp"
#include "glpin/expansion.hpp"
#include "glpin/fourier.hpp"
#include "glpin/renorm.hpp"

using namespace glpin;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    int threads = 0;
    std::optional<std::uint64_t> seed;
    int resolution_override = 0;
};

ExperimentConfig load_config(const CommonOpts& o) {
    ExperimentConfig cfg = ExperimentConfig::from_json_file(o.config_path);
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.threads > 0) cfg.threads = o.threads;
    if (o.seed) cfg.seed = *o.seed;
    if (o.resolution_override > 0) {
        cfg.domain.n = o.resolution_override;
        cfg.pinning.validate(*cfg.domain.build());
    }
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "experiment config document (JSON)")
        ->required();
    cmd->add_option("--out", o.out_dir, "output directory root");
    cmd->add_option("--threads", o.threads, "worker threads for sweep rungs");
    cmd->add_option("--seed", o.seed, "override the RNG seed");
    cmd->add_option("--resolution-override", o.resolution_override,
                    "override the grid resolution n");
}

FourierTrace trace_from_json(const json& j) {
    int nmax = 0;
    for (const auto& c : j) nmax = std::max(nmax, std::abs(c.at(0).get<int>()));
    FourierTrace t(nmax);
    for (const auto& c : j)
        t.coeff(c.at(0).get<int>()) = cplx{c.at(1).get<double>(), c.at(2).get<double>()};
    return t;
}

json params_json(const std::string& params) {
    if (!params.empty() && params.front() == '{') return json::parse(params);
    std::ifstream is(params);
    if (!is) throw ConfigError("cannot open params file: " + params);
    return json::parse(is);
}

int run_renorm(const std::string& op, const std::string& params, const std::string& out) {
    const json p = params.empty() ? json::object() : params_json(params);
    json result;
    if (op == "hhalf") {
        result["value"] = hhalf_seminorm(trace_from_json(p.at("coefficients")));
        result["formula"] = "sum |n| |c_n|^2";
    } else if (op == "annulus") {
        result["value"] = annulus_energy(trace_from_json(p.at("inner")),
                                         trace_from_json(p.at("outer")),
                                         p.at("R").get<double>());
        result["formula"] = "harmonic annulus Dirichlet energy / (2 pi), Fourier series";
    } else if (op == "optimizer") {
        const auto optima = discrete_optimizer(
            p.at("M").get<int>(), p.at("d").get<int>(), p.at("ln_delta").get<double>(),
            p.at("ln_xi").get<double>(), p.at("b").get<double>());
        json arr = json::array();
        for (const auto& c : optima) arr.push_back(c.degrees);
        result["optima"] = arr;
        result["formula"] = "argmin pi sum d_i^2 |ln delta| + pi b^2 sum |d_i| |ln xi|";
    } else if (op == "gamma") {
        GammaOptions go;
        go.grid_n = p.value("grid_n", go.grid_n);
        const GammaResult g =
            compute_gamma(p.at("eps_eff").get<double>(), p.at("r").get<double>(), go);
        result["value"] = g.value;
        result["estimate_coarse"] = g.estimate_coarse;
        result["estimate_fine"] = g.estimate_fine;
        result["formula"] = "min E - pi ln(r/eps_eff)";
    } else if (op == "wg") {
        std::vector<Vec2> pts;
        for (const auto& q : p.at("points")) pts.push_back({q.at(0), q.at(1)});
        std::vector<int> degs = p.at("degrees").get<std::vector<int>>();
        int degree = 0;
        for (int dd : degs) degree += dd;
        BoundaryData g = BoundaryData::pure(degree);
        DomainSpec dom = DomainSpec::disc(64, p.value("radius", 1.0));
        WgOptions wo;
        wo.grid_n = p.value("grid_n", wo.grid_n);
        const WgResult w = extract_Wg(dom, g, pts, degs, wo);
        result["value"] = w.value;
        result["I_rho"] = w.I_rho;
        result["rho"] = w.rho;
        result["formula"] = "I_rho - pi sum(d_i^2) |ln rho|, extrapolated";
    } else if (op == "tildew2") {
        std::vector<Vec2> betas;
        for (const auto& q : p.at("betas")) betas.push_back({q.at(0), q.at(1)});
        const double b = p.at("b").get<double>();
        InclusionShape omega = InclusionShape::disc(p.value("omega_radius", 0.5));
        BoundaryData g0 = BoundaryData::pure(static_cast<int>(betas.size()));
        TildeW2Options to;
        to.grid_n = p.value("grid_n", to.grid_n);
        const TildeW2Result r = extract_tildeW2(betas, g0, b, omega, to);
        result["value"] = r.value;
        result["remainder"] = r.remainder;
        result["formula"] = "K(r) - pi d0 b^2 |ln r|, extrapolated in r^2";
    } else if (op == "tildew") {
        std::vector<Vec2> betas;
        for (const auto& q : p.at("betas")) betas.push_back({q.at(0), q.at(1)});
        const double b = p.at("b").get<double>();
        InclusionShape omega = InclusionShape::disc(p.value("omega_radius", 0.5));
        TildeWOptions to;
        to.n_modes = p.value("n_modes", to.n_modes);
        to.grid_n = p.value("grid_n", to.grid_n);
        const TildeWResult r =
            extract_tildeW(betas, b, omega, static_cast<int>(betas.size()), to);
        result["value"] = r.value;
        result["W1"] = r.W1;
        result["W2"] = r.W2;
        result["stagnated"] = r.stagnated;
        result["formula"] = "inf over traces of W1 + W2 (upper bound, compass search)";
    } else {
        throw ConfigError("unknown renorm op: " + op);
    }
    const std::string text = result.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(out);
        os << text;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ginzburg-Landau pinning laboratory"};
    app.require_subcommand(1);

    CommonOpts solve_o, sweep_o, predict_o;
    auto* solve = app.add_subcommand("solve", "special solution + minimizer + vortex report");
    add_common(solve, solve_o);
    auto* sweep = app.add_subcommand("sweep", "eps ladder with slope fits");
    add_common(sweep, sweep_o);
    auto* predict = app.add_subcommand("predict", "degree split, chosen inclusions, offsets");
    add_common(predict, predict_o);

    std::vector<std::string> verify_paths;
    double verify_threshold = 0.1;
    auto* verify = app.add_subcommand("verify", "compare interior offsets across records");
    verify->add_option("records", verify_paths, "record.json paths")->required();
    verify->add_option("--threshold", verify_threshold, "offset agreement threshold");

    std::string renorm_op, renorm_params, renorm_out;
    auto* renorm = app.add_subcommand("renorm", "direct access to renormalized energies");
    renorm->add_option("--op", renorm_op,
                       "hhalf | annulus | optimizer | gamma | wg | tildew2 | tildew")
        ->required();
    renorm->add_option("--params", renorm_params, "JSON parameters (inline or file)");
    renorm->add_option("--out", renorm_out, "write the result to a file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            const auto out = cmd_solve(load_config(solve_o));
            std::cout << (out.dir.empty() ? out.record.to_json()
                                          : out.dir + "/record.json\n");
        } else if (sweep->parsed()) {
            const auto out = cmd_sweep(load_config(sweep_o));
            std::cout << (out.dir.empty() ? out.record.to_json()
                                          : out.dir + "/record.json\n");
        } else if (predict->parsed()) {
            std::cout << cmd_predict(load_config(predict_o)).to_json();
        } else if (verify->parsed()) {
            std::cout << cmd_verify(verify_paths, verify_threshold).to_json();
        } else if (renorm->parsed()) {
            return run_renorm(renorm_op, renorm_params, renorm_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
