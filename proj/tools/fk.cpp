// Command-line front end: initial conditions, reference/particle solves,
// benchmarks, operator export and the propagation service.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "fk/bench.hpp"
#include "fk/error.hpp"
#include "fk/field_io.hpp"
#include "fk/init_sampler.hpp"
#include "fk/propagator.hpp"
#include "fk/ref_solvers.hpp"
#include "fk/service.hpp"
#include "fk/spectral.hpp"

namespace {

fk::PdeSpec load_pde(const std::string& path) {
    const auto cfg = fk::Config::load(path);
    cfg.require_known(fk::pde_config_keys());
    return fk::pde_from_config(cfg);
}

fk::PropagatorConfig propagator_options(double dt, double eps, const std::string& drift,
                                        const std::string& interp) {
    fk::PropagatorConfig c;
    c.dt = dt;
    c.epsilon = eps;
    if (drift != "heun" && drift != "euler") throw fk::FormatError("--drift must be heun or euler");
    if (interp != "auto" && interp != "off") throw fk::FormatError("--interpolation must be auto or off");
    c.drift = drift == "heun" ? fk::DriftScheme::Heun : fk::DriftScheme::Euler;
    c.interpolation = interp == "auto" ? fk::Interpolation::Auto : fk::Interpolation::Off;
    return c;
}

int gen_ic(const std::string& pde, int count, std::uint64_t seed, int N, int resolution,
           const std::string& boundary, const std::string& out) {
    std::mt19937_64 rng(seed);
    std::vector<fk::Field> frames;
    if (pde == "navier_stokes") {
        const auto g = fk::make_grid(2, resolution > 0 ? resolution : 64, 1.0, fk::BoundaryKind::Periodic);
        for (int i = 0; i < count; ++i) frames.push_back(fk::sample_grf(fk::GrfSpec{}, g, rng));
    } else if (pde == "convdiff" || pde == "allen_cahn") {
        const bool ac = pde == "allen_cahn";
        const auto kind = fk::parse_boundary(boundary.empty() ? (ac ? "dirichlet" : "periodic") : boundary);
        const auto g = fk::make_grid(1, resolution > 0 ? resolution : (ac ? 65 : 64), 1.0, kind);
        for (int i = 0; i < count; ++i) frames.push_back(fk::sample_fourier_ic(N, g, rng));
    } else {
        throw fk::FormatError("unknown pde '" + pde + "'");
    }
    fk::save_fields(out, frames);
    return 0;
}

int solve_ref(const fk::PdeSpec& pde, const std::string& ic_path, const std::string& out,
              int steps, const std::string& scheme, int internal) {
    const auto ics = fk::load_fields(ic_path);
    std::vector<fk::Field> frames;
    for (const auto& ic : ics) {
        fk::SolverRun run;
        run.steps = steps;
        run.frames = pde.frames;
        run.output_resolution = pde.grid.resolution(0);
        run.internal_resolution = internal > 0 ? internal : ic.grid().resolution(0);
        fk::Trajectory tr;
        if (const auto* cd = std::get_if<fk::ConvectionDiffusion>(&pde.model)) {
            run.scheme = scheme == "exact" ? fk::Scheme::SpectralExact : fk::Scheme::SpectralRK2;
            tr = fk::spectral_convdiff_solve(ic, cd->beta, cd->kappa, pde.horizon, run);
        } else if (const auto* ac = std::get_if<fk::AllenCahn>(&pde.model)) {
            run.scheme = fk::Scheme::FiniteDifferenceRK2;
            tr = fk::fd_allen_cahn_solve(ic, pde.grid.boundary(), ac->kappa, pde.horizon, run);
        } else {
            const auto& ns = std::get<fk::NavierStokesVorticity>(pde.model);
            run.scheme = fk::Scheme::SpectralCrankNicolson;
            tr = fk::crank_nicolson_ns_solve(ic, ns.nu, ns.forcing, pde.horizon, run);
        }
        for (const auto& n : tr.notes) std::cerr << "warning: " << n << '\n';
        frames.insert(frames.end(), tr.frames.begin(), tr.frames.end());
    }
    fk::save_fields(out, frames);
    return 0;
}

int solve_mc(const fk::PdeSpec& pde, const std::string& ic_path, const std::string& out, int M,
             int steps, std::uint64_t seed) {
    const auto ics = fk::load_fields(ic_path);
    std::vector<fk::Field> frames;
    for (std::size_t i = 0; i < ics.size(); ++i) {
        fk::SolverRun run;
        run.scheme = fk::Scheme::ParticleMC;
        run.steps = steps;
        run.frames = pde.frames;
        run.seed = (seed << 32) | i;
        const auto tr = fk::mc_solve_full(pde, ics[i], M, run);
        frames.insert(frames.end(), tr.frames.begin(), tr.frames.end());
    }
    fk::save_fields(out, frames);
    return 0;
}

int bench(const std::string& config_path, const std::string& out) {
    fk::ExperimentConfig cfg;
    try {
        cfg = fk::ExperimentConfig::from_config(fk::Config::load(config_path));
    } catch (const fk::FormatError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    }
    const fk::Report rep = fk::run_experiment(cfg);
    std::ofstream(out) << rep.to_json().dump(2) << '\n';
    std::filesystem::path csv(out);
    csv.replace_extension();
    csv += "_E" + std::to_string(cfg.case_id) + ".csv";
    std::ofstream(csv) << rep.frame_csv();
    const auto& p = rep.payload;
    std::cout << p["config"]["suite"].get<std::string>() << " E" << cfg.case_id
              << "  E_l2 = " << p["mean_l2"].dump() << "  E_linf = " << p["mean_linf"].dump()
              << (rep.blowup ? "  (blow-up)" : "") << '\n';
    return rep.blowup ? 2 : 0;
}

int serve(const std::string& pde_config, const std::string& transport, std::size_t cap) {
    fk::ServiceOptions opt;
    if (!pde_config.empty()) opt.pde = load_pde(pde_config);
    opt.max_payload_bytes = cap;
    fk::Service service(opt);
    if (transport == "stdio") {
        fk::FdTransport t(0, 1);
        service.serve(t);
        return 0;
    }
    if (transport.rfind("tcp:", 0) == 0) {
        const int port = std::stoi(transport.substr(4));
        fk::TcpServer server(service, port);
        std::cerr << "listening on 127.0.0.1:" << server.port() << '\n';
        server.run();
        return 0;
    }
    throw fk::FormatError("--transport must be stdio or tcp:PORT");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feynman-Kac PDE engine"};
    app.require_subcommand(1);

    std::string pde_name, out, boundary, ic_path, pde_cfg, scheme = "rk2", config, transport = "stdio";
    std::string drift = "heun", interp = "auto";
    int count = 1, N = 5, resolution = 0, steps = 0, internal = 0, particles = 200;
    std::uint64_t seed = 0;
    double dt = 0.2, eps = 1e-4;
    std::size_t cap = 64u << 20;

    auto* g = app.add_subcommand("gen-ic", "sample initial conditions into an FKF1 file");
    g->add_option("--pde", pde_name, "convdiff | allen_cahn | navier_stokes")->required();
    g->add_option("--count", count, "number of samples");
    g->add_option("--seed", seed, "RNG seed");
    g->add_option("--N", N, "maximum frequency of the sine series");
    g->add_option("--grid", resolution, "points per axis");
    g->add_option("--boundary", boundary, "periodic | dirichlet | neumann");
    g->add_option("--out", out, "output file")->required();

    auto* r = app.add_subcommand("solve-ref", "reference trajectories for FKF1 initial conditions");
    r->add_option("--pde-config", pde_cfg, "pde key=value file")->required();
    r->add_option("--ic", ic_path, "initial conditions (FKF1)")->required();
    r->add_option("--out", out, "trajectory output (FKF1)")->required();
    r->add_option("--steps", steps, "time steps over the horizon")->required();
    r->add_option("--scheme", scheme, "rk2 | exact (convdiff only)");
    r->add_option("--internal-resolution", internal, "integrator resolution (default: input)");

    auto* m = app.add_subcommand("solve-mc", "particle Monte Carlo trajectories");
    m->add_option("--pde-config", pde_cfg, "pde key=value file")->required();
    m->add_option("--ic", ic_path, "initial conditions (FKF1)")->required();
    m->add_option("--out", out, "trajectory output (FKF1)")->required();
    m->add_option("--particles", particles, "paths per grid point");
    m->add_option("--steps", steps, "Euler-Maruyama steps over the horizon");
    m->add_option("--seed", seed, "RNG seed");

    auto* b = app.add_subcommand("bench", "run one experiment and write a report");
    b->add_option("--config", config, "experiment key=value file")->required();
    b->add_option("--out", out, "report JSON path")->required();

    auto* s = app.add_subcommand("serve", "propagation service over FKP1 frames");
    s->add_option("--pde-config", pde_cfg, "pde registered for requests without a descriptor");
    s->add_option("--transport", transport, "stdio | tcp:PORT");
    s->add_option("--max-payload", cap, "largest accepted payload in bytes");

    auto* e = app.add_subcommand("export-op", "write the one-step linear operator (FKW1)");
    e->add_option("--pde-config", pde_cfg, "pde key=value file")->required();
    e->add_option("--dt", dt, "time step");
    e->add_option("--epsilon", eps, "radius tail tolerance");
    e->add_option("--drift", drift, "heun | euler");
    e->add_option("--interpolation", interp, "auto | off");
    e->add_option("--out", out, "operator file")->required();

    auto* p = app.add_subcommand("propagate", "iterate the deterministic propagator");
    p->add_option("--pde-config", pde_cfg, "pde key=value file")->required();
    p->add_option("--ic", ic_path, "initial conditions (FKF1)")->required();
    p->add_option("--out", out, "trajectory output (FKF1)")->required();
    p->add_option("--steps", steps, "propagation steps over the horizon")->required();
    p->add_option("--epsilon", eps, "radius tail tolerance");
    p->add_option("--drift", drift, "heun | euler");
    p->add_option("--interpolation", interp, "auto | off");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*g) return gen_ic(pde_name, count, seed, N, resolution, boundary, out);
        if (*r) return solve_ref(load_pde(pde_cfg), ic_path, out, steps, scheme, internal);
        if (*m) return solve_mc(load_pde(pde_cfg), ic_path, out, particles, steps > 0 ? steps : 200, seed);
        if (*b) return bench(config, out);
        if (*s) return serve(pde_cfg, transport, cap);
        if (*e) {
            const auto pde = load_pde(pde_cfg);
            fk::save_operator(out, fk::assemble_linear_operator(pde, propagator_options(dt, eps, drift, interp)));
            return 0;
        }
        if (*p) {
            const auto pde = load_pde(pde_cfg);
            const auto cfg = propagator_options(pde.horizon / steps, eps, drift, interp);
            std::vector<fk::Field> frames;
            for (const auto& ic : fk::load_fields(ic_path)) {
                const auto tr = fk::iterate_propagator(ic, pde, steps, cfg);
                frames.insert(frames.end(), tr.frames.begin(), tr.frames.end());
            }
            fk::save_fields(out, frames);
            return 0;
        }
    } catch (const fk::FormatError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 3;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
