#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "glpin/bad_discs.hpp"
#include "glpin/boundary.hpp"
#include "glpin/degree_alloc.hpp"
#include "glpin/gl_solver.hpp"
#include "glpin/pinning.hpp"
#include "glpin/renorm.hpp"
#include "glpin/special_solution.hpp"
#include "glpin/vortex.hpp"

namespace glpin {

/// How delta follows eps along a sweep ladder.
struct DeltaRule {
    enum class Kind { Fixed, Power, ExpQuarter };
    Kind kind = Kind::Fixed;
    double q = 1.0 / 3.0; // delta = eps^q

    double delta_for(double eps, double fixed_delta) const;
};

/// A full experiment description; parsed from a strict versioned JSON schema
/// (unknown keys are rejected).
struct ExperimentConfig {
    DomainSpec domain;
    PinningConfig pinning; // eps/delta act as the template scales
    BoundaryData boundary;
    std::vector<double> eps_ladder; // empty: single rung at pinning.eps
    DeltaRule delta_rule;
    SolverOptions solver;
    int prediction_grid_n = 192; // phase-solve resolution for seeds/predictions
    std::string out_dir = "runs";
    std::uint64_t seed = 0;
    int threads = 1;

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
    std::string canonical_json() const;
    std::string config_hash() const;  // fnv1a over the canonical document
    std::string pinning_hash() const; // over the domain+pinning subdocument
    std::string boundary_signature() const;

    bool case_two() const { return boundary.degree > pinning.count(); }
};

struct RungResult {
    double eps = 0, delta = 0, xi = 0;
    ScaleDiagnostics scales;
    EnergyBreakdown F;
    double E_of_U = 0;
    long u_iterations = 0;
    long solver_iterations = 0;
    double solver_residual = 0;
    std::string seed_name;
    double subst_residual = 0;
    VortexReport zeros;
    std::vector<Vec2> offsets; // rescaled (pos - a_i)/delta per zero
    ModulusFloor floor;
    int bad_count = 0, separated_count = 0;
    double bad_lambda = 1.0;
    double wall_seconds = 0; // never hashed
};

struct SweepFit {
    std::vector<std::string> basis;
    std::map<std::string, double> coefficients;
    std::map<std::string, double> predicted;
    std::vector<std::string> warnings;
};

struct RunRecord {
    std::string mode;       // "solve" | "sweep"
    std::string case_label; // "I" | "II" | "none"
    std::string config_hash, pinning_hash, boundary_sig;
    std::string config_canonical;
    std::vector<RungResult> rungs;
    std::optional<SweepFit> fit;

    std::string to_json() const; // deterministic bytes; excludes wall times
};

/// Runs solve_U + minimize_F + vortex analysis on the template scales and,
/// when persist is set, writes record.json, field binaries and CSV tables
/// under <out_dir>/<config_hash>/.
struct RunOutput {
    RunRecord record;
    std::string dir; // empty when not persisted
};
RunOutput cmd_solve(const ExperimentConfig& cfg, bool persist = true);

/// Ladder of solves with the least-squares fit of F against
/// {|ln eps|, |ln delta|, 1} and the predicted coefficients.
RunOutput cmd_sweep(const ExperimentConfig& cfg, bool persist = true);

struct PredictRecord {
    std::vector<DegreeConfiguration> optimizer_optima;
    SelectionResult selection;
    std::map<int, std::vector<Vec2>> offsets_by_degree; // reference coordinates
    std::string config_hash;

    std::string to_json() const;
};
PredictRecord cmd_predict(const ExperimentConfig& cfg);

struct VerifyReport {
    int records = 0;
    bool boundary_differs = false;
    double max_offset_distance = 0.0; // omega units
    double threshold = 0.1;
    bool within_threshold = true;
    std::vector<std::string> notes;

    std::string to_json() const;
};
/// Compares rescaled interior vortex offsets across persisted records that
/// share the pinning configuration.  Throws when pinning hashes differ.
VerifyReport cmd_verify(const std::vector<std::string>& record_paths,
                        double threshold = 0.1);

/// Least-squares refit of persisted per-rung energies (the reproducibility
/// contract for sweep records).
SweepFit fit_sweep(const std::vector<double>& eps, const std::vector<double>& delta,
                   const std::vector<double>& F_total, const ExperimentConfig& cfg);

/// Optimal in-inclusion offsets for d0 zeros: compass minimization of the
/// local renormalized energy with the radial trace.
std::vector<Vec2> optimal_offsets(int d0, double b, const InclusionShape& omega,
                                  int grid_n = 128);

std::string fnv1a_hex(const std::string& data);

} // namespace glpin
