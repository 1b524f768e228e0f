#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fk/config.hpp"
#include "fk/kernel.hpp"
#include "fk/pde.hpp"
#include "fk/ref_solvers.hpp"

namespace fk {

struct ErrorCurve {
    std::vector<double> l2;    // per frame
    std::vector<double> linf;  // per frame, normalized by max |ref|
    double mean_l2 = 0.0;
    double mean_linf = 0.0;
};

/// Frame-wise relative errors; throws InvalidArgument for mismatched shapes
/// or a reference frame that is identically zero.
ErrorCurve relative_errors(const std::vector<Field>& pred, const std::vector<Field>& ref);

enum class Suite { ConvDiff, AllenCahn, NavierStokes };
enum class SolverKind { Propagator, ParticleMC, Spectral };

struct ExperimentConfig {
    Suite suite = Suite::ConvDiff;
    int case_id = 1;
    SolverKind solver = SolverKind::Propagator;
    int propagator_steps = 10;  // propagation steps over the horizon
    int particles = 200;
    int mc_steps = 200;
    int solver_steps = 0;  // spectral solver under test; 0 = reference steps
    int test_size = 50;
    std::vector<std::uint64_t> seeds{0, 1, 2};
    std::int64_t test_seed = -1;  // -1: 1 for the 1D suites, 0 for Navier-Stokes
    DriftScheme drift = DriftScheme::Heun;
    Interpolation interpolation = Interpolation::Auto;
    double epsilon = 1e-4;
    int ref_resolution = 0;  // 0: suite default
    int ref_steps = 0;       // 0: suite default
    bool paper_scale = false;

    static ExperimentConfig from_config(const Config& cfg);
    static const std::set<std::string>& keys();
    nlohmann::json to_json() const;

    PdeSpec pde() const;
    std::uint64_t effective_test_seed() const;
    int effective_ref_resolution() const;
    int effective_ref_steps() const;
    PropagatorConfig propagator_config(const PdeSpec& pde) const;
};

std::string_view to_string(Suite s);
std::string_view to_string(SolverKind s);

struct TestCase {
    Field ic;             // on the pde grid
    Field ic_reference;   // on the reference grid
    Trajectory reference;
};

/// Test initial conditions (dedicated test seed) and their reference runs.
std::vector<TestCase> make_test_set(const ExperimentConfig& cfg);
std::vector<TestCase> make_test_set(const ExperimentConfig& cfg, int count);

/// Reference trajectory for one initial condition given on the reference grid.
Trajectory reference_solve(const ExperimentConfig& cfg, const PdeSpec& pde, const Field& ic_ref,
                           int steps);

/// Iterates propagate over the horizon and returns the frames.
Trajectory iterate_propagator(const Field& ic, const PdeSpec& pde, int steps,
                              const PropagatorConfig& config);

/// Runs the solver under test for one test case and seed.
Trajectory run_solver(const ExperimentConfig& cfg, const PdeSpec& pde, const TestCase& tc,
                      std::uint64_t seed);

struct Report {
    nlohmann::json payload;  // deterministic part: config echo, rows, statistics
    nlohmann::json timings;  // wall-clock seconds, excluded from the payload
    bool blowup = false;

    nlohmann::json to_json() const;
    std::string frame_csv() const;  // frame,e_l2,e_linf (mean over seeds)
};

Report run_experiment(const ExperimentConfig& cfg);

}  // namespace fk
