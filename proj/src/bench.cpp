#include "fk/bench.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "fk/error.hpp"
#include "fk/init_sampler.hpp"
#include "fk/propagator.hpp"
#include "fk/spectral.hpp"

namespace fk {

ErrorCurve relative_errors(const std::vector<Field>& pred, const std::vector<Field>& ref) {
    if (pred.size() != ref.size() || ref.empty())
        throw InvalidArgument("trajectories must have the same, nonzero frame count");
    ErrorCurve e;
    for (std::size_t f = 0; f < ref.size(); ++f) {
        if (!(pred[f].grid() == ref[f].grid()) || pred[f].values().size() != ref[f].values().size())
            throw InvalidArgument("trajectory frames live on different grids");
        double diff2 = 0.0, ref2 = 0.0, diffmax = 0.0, refmax = 0.0;
        const auto a = pred[f].values();
        const auto b = ref[f].values();
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double d = a[i] - b[i];
            diff2 += d * d;
            ref2 += b[i] * b[i];
            diffmax = std::max(diffmax, std::abs(d));
            refmax = std::max(refmax, std::abs(b[i]));
        }
        if (ref2 == 0.0) throw InvalidArgument("reference frame has zero norm");
        e.l2.push_back(std::sqrt(diff2) / std::sqrt(ref2));
        e.linf.push_back(diffmax / refmax);
    }
    for (std::size_t f = 0; f < e.l2.size(); ++f) {
        e.mean_l2 += e.l2[f];
        e.mean_linf += e.linf[f];
    }
    e.mean_l2 /= static_cast<double>(e.l2.size());
    e.mean_linf /= static_cast<double>(e.linf.size());
    return e;
}

std::string_view to_string(Suite s) {
    switch (s) {
    case Suite::ConvDiff: return "convdiff";
    case Suite::AllenCahn: return "allen_cahn";
    case Suite::NavierStokes: return "navier_stokes";
    }
    return "convdiff";
}

std::string_view to_string(SolverKind s) {
    switch (s) {
    case SolverKind::Propagator: return "propagator";
    case SolverKind::ParticleMC: return "mc";
    case SolverKind::Spectral: return "spectral";
    }
    return "propagator";
}

const std::set<std::string>& ExperimentConfig::keys() {
    static const std::set<std::string> k{
        "suite",     "case",     "solver",     "steps",        "particles",     "mc_steps",
        "solver_steps", "test_size", "seeds",   "test_seed",    "drift",         "interpolation",
        "epsilon",   "ref_resolution", "ref_steps", "paper_scale"};
    return k;
}

ExperimentConfig ExperimentConfig::from_config(const Config& cfg) {
    cfg.require_known(keys());
    ExperimentConfig c;
    const std::string suite = cfg.get("suite");
    if (suite == "convdiff") c.suite = Suite::ConvDiff;
    else if (suite == "allen_cahn") c.suite = Suite::AllenCahn;
    else if (suite == "navier_stokes") c.suite = Suite::NavierStokes;
    else throw FormatError("unknown suite '" + suite + "'");

    std::string cs = cfg.get("case", "1");
    if (!cs.empty() && (cs[0] == 'E' || cs[0] == 'e')) cs = cs.substr(1);
    Config tmp;
    tmp.set("case", cs);
    c.case_id = tmp.get_int("case");
    if (c.case_id < 1 || c.case_id > 4) throw FormatError("case must be E1..E4");

    const std::string solver = cfg.get("solver", "propagator");
    if (solver == "propagator") c.solver = SolverKind::Propagator;
    else if (solver == "mc") c.solver = SolverKind::ParticleMC;
    else if (solver == "spectral") c.solver = SolverKind::Spectral;
    else throw FormatError("unknown solver '" + solver + "'");
    if (c.solver == SolverKind::ParticleMC && c.suite != Suite::ConvDiff)
        throw FormatError("the particle solver supports the convdiff suite only");

    c.paper_scale = cfg.get_bool("paper_scale", false);
    c.propagator_steps = cfg.get_int("steps", c.propagator_steps);
    c.particles = cfg.get_int("particles", c.particles);
    c.mc_steps = cfg.get_int("mc_steps", c.mc_steps);
    c.solver_steps = cfg.get_int("solver_steps", 0);
    c.test_size = cfg.get_int("test_size", c.paper_scale ? 200 : 50);
    c.test_seed = cfg.has("test_seed") ? cfg.get_int("test_seed") : -1;
    c.epsilon = cfg.get_double("epsilon", c.epsilon);
    c.ref_resolution = cfg.get_int("ref_resolution", 0);
    c.ref_steps = cfg.get_int("ref_steps", 0);
    if (cfg.has("seeds")) {
        c.seeds.clear();
        std::stringstream ss(cfg.get("seeds"));
        std::string item;
        while (std::getline(ss, item, ',')) {
            Config one;
            one.set("seed", item);
            const int v = one.get_int("seed");
            if (v < 0) throw FormatError("seeds must be non-negative");
            c.seeds.push_back(static_cast<std::uint64_t>(v));
        }
        if (c.seeds.empty()) throw FormatError("seeds must be nonempty");
    }
    const std::string drift = cfg.get("drift", "heun");
    if (drift == "heun") c.drift = DriftScheme::Heun;
    else if (drift == "euler") c.drift = DriftScheme::Euler;
    else throw FormatError("drift must be heun or euler");
    const std::string interp = cfg.get("interpolation", "auto");
    if (interp == "auto") c.interpolation = Interpolation::Auto;
    else if (interp == "off") c.interpolation = Interpolation::Off;
    else throw FormatError("interpolation must be auto or off");

    if (c.propagator_steps < 1 || c.particles < 1 || c.mc_steps < 1 || c.test_size < 1 ||
        c.solver_steps < 0 || c.ref_steps < 0 || c.ref_resolution < 0 ||
        !(c.epsilon > 0.0 && c.epsilon < 0.5))
        throw FormatError("numeric experiment settings out of range");
    if (c.propagator_steps % c.pde().frames != 0)
        throw FormatError("steps must be a multiple of the frame count");
    return c;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json seeds_json = seeds;
    return {{"suite", std::string(to_string(suite))},
            {"case", "E" + std::to_string(case_id)},
            {"solver", std::string(to_string(solver))},
            {"steps", propagator_steps},
            {"particles", particles},
            {"mc_steps", mc_steps},
            {"solver_steps", solver_steps},
            {"test_size", test_size},
            {"seeds", seeds_json},
            {"test_seed", effective_test_seed()},
            {"drift", drift == DriftScheme::Heun ? "heun" : "euler"},
            {"interpolation", interpolation == Interpolation::Auto ? "auto" : "off"},
            {"epsilon", epsilon},
            {"ref_resolution", effective_ref_resolution()},
            {"ref_steps", effective_ref_steps()},
            {"paper_scale", paper_scale}};
}

PdeSpec ExperimentConfig::pde() const {
    switch (suite) {
    case Suite::ConvDiff: return convdiff_case(case_id);
    case Suite::AllenCahn: return allen_cahn_case(case_id);
    case Suite::NavierStokes: return navier_stokes_case(case_id);
    }
    return convdiff_case(case_id);
}

std::uint64_t ExperimentConfig::effective_test_seed() const {
    if (test_seed >= 0) return static_cast<std::uint64_t>(test_seed);
    return suite == Suite::NavierStokes ? 0 : 1;
}

int ExperimentConfig::effective_ref_resolution() const {
    if (ref_resolution > 0) return ref_resolution;
    switch (suite) {
    case Suite::ConvDiff: return 1024;
    case Suite::AllenCahn: return 1025;
    case Suite::NavierStokes: return 256;
    }
    return 1024;
}

int ExperimentConfig::effective_ref_steps() const {
    if (ref_steps > 0) return ref_steps;
    switch (suite) {
    case Suite::ConvDiff: return 200000;  // dt = 1e-5 over T = 2
    case Suite::AllenCahn: return paper_scale ? 1000000 : 40000;
    case Suite::NavierStokes: return paper_scale ? 100000 : 2000;
    }
    return 200000;
}

PropagatorConfig ExperimentConfig::propagator_config(const PdeSpec& p) const {
    PropagatorConfig pc;
    pc.dt = p.horizon / propagator_steps;
    pc.epsilon = epsilon;
    pc.drift = drift;
    pc.interpolation = interpolation;
    return pc;
}

Trajectory reference_solve(const ExperimentConfig& cfg, const PdeSpec& pde, const Field& ic_ref,
                           int steps) {
    SolverRun run;
    run.steps = steps;
    run.frames = pde.frames;
    run.internal_resolution = cfg.effective_ref_resolution();
    run.output_resolution = pde.grid.resolution(0);
    if (const auto* cd = std::get_if<ConvectionDiffusion>(&pde.model)) {
        run.scheme = Scheme::SpectralRK2;
        return spectral_convdiff_solve(ic_ref, cd->beta, cd->kappa, pde.horizon, run);
    }
    if (const auto* ac = std::get_if<AllenCahn>(&pde.model)) {
        run.scheme = Scheme::FiniteDifferenceRK2;
        return fd_allen_cahn_solve(ic_ref, pde.grid.boundary(), ac->kappa, pde.horizon, run);
    }
    const auto& ns = std::get<NavierStokesVorticity>(pde.model);
    run.scheme = Scheme::SpectralCrankNicolson;
    return crank_nicolson_ns_solve(ic_ref, ns.nu, ns.forcing, pde.horizon, run);
}

std::vector<TestCase> make_test_set(const ExperimentConfig& cfg) {
    return make_test_set(cfg, cfg.test_size);
}

std::vector<TestCase> make_test_set(const ExperimentConfig& cfg, int count) {
    const PdeSpec pde = cfg.pde();
    std::mt19937_64 rng(cfg.effective_test_seed());
    const int ref_res = cfg.effective_ref_resolution();
    std::vector<TestCase> out;
    for (int i = 0; i < count; ++i) {
        TestCase tc;
        if (cfg.suite == Suite::NavierStokes) {
            const Grid fine = make_grid(2, ref_res, pde.grid.extent(0), BoundaryKind::Periodic);
            tc.ic_reference = sample_grf(GrfSpec{}, fine, rng);
            tc.ic = subsample(tc.ic_reference, ref_res / pde.grid.resolution(0));
        } else {
            const auto ic = FourierSeriesIC::draw(pde.N, rng);
            const Grid fine = make_grid(1, ref_res, pde.grid.extent(0), pde.grid.boundary());
            tc.ic = ic.sample(pde.grid);
            tc.ic_reference = ic.sample(fine);
        }
        out.push_back(std::move(tc));
    }
    // References are independent; solve them in parallel.
    const int steps = cfg.effective_ref_steps();
    std::vector<std::exception_ptr> errors(out.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < static_cast<long long>(out.size()); ++i) {
        try {
            out[static_cast<std::size_t>(i)].reference =
                reference_solve(cfg, pde, out[static_cast<std::size_t>(i)].ic_reference, steps);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

Trajectory iterate_propagator(const Field& ic, const PdeSpec& pde, int steps,
                              const PropagatorConfig& config) {
    if (steps % pde.frames != 0) throw InvalidArgument("steps must be a multiple of frames");
    PropagatorConfig pc = config;
    pc.dt = pde.horizon / steps;
    const int per_frame = steps / pde.frames;
    Trajectory tr;
    tr.grid = pde.grid;
    if (pde.linear()) {
        // One assembly serves every step.
        const SparseOperator op = assemble_linear_operator(pde, pc);
        Field u = ic;
        for (int s = 1; s <= steps; ++s) {
            u = op.apply(u);
            if (s % per_frame == 0) {
                tr.frames.push_back(u);
                tr.times.push_back(pde.horizon * (s / per_frame) / pde.frames);
            }
        }
        return tr;
    }
    Field u = ic;
    for (int s = 1; s <= steps; ++s) {
        u = propagate(u, pde, (s - 1) * pc.dt, pc);
        if (s % per_frame == 0) {
            tr.frames.push_back(u);
            tr.times.push_back(pde.horizon * (s / per_frame) / pde.frames);
        }
    }
    return tr;
}

Trajectory run_solver(const ExperimentConfig& cfg, const PdeSpec& pde, const TestCase& tc,
                      std::uint64_t seed) {
    switch (cfg.solver) {
    case SolverKind::Propagator:
        return iterate_propagator(tc.ic, pde, cfg.propagator_steps, cfg.propagator_config(pde));
    case SolverKind::ParticleMC: {
        SolverRun run;
        run.scheme = Scheme::ParticleMC;
        run.steps = cfg.mc_steps;
        run.frames = pde.frames;
        run.seed = seed;
        return mc_solve_full(pde, tc.ic, cfg.particles, run);
    }
    case SolverKind::Spectral: {
        const int steps = cfg.solver_steps > 0 ? cfg.solver_steps : cfg.effective_ref_steps();
        return reference_solve(cfg, pde, tc.ic_reference, steps);
    }
    }
    throw InvalidArgument("unknown solver");
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
    if (v.empty()) return {std::nan(""), std::nan("")};
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return {m, std::sqrt(s / static_cast<double>(v.size()))};
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg) {
    const PdeSpec pde = cfg.pde();
    Report rep;
    const auto t0 = std::chrono::steady_clock::now();
    const auto tests = make_test_set(cfg);
    rep.timings["reference_seconds"] = seconds_since(t0);

    nlohmann::json rows = nlohmann::json::array();
    std::vector<double> l2s, linfs;
    std::vector<double> frame_l2(static_cast<std::size_t>(pde.frames), 0.0);
    std::vector<double> frame_linf(static_cast<std::size_t>(pde.frames), 0.0);
    int curves = 0;
    nlohmann::json seed_times = nlohmann::json::array();
    for (std::uint64_t seed : cfg.seeds) {
        const auto ts = std::chrono::steady_clock::now();
        std::vector<ErrorCurve> per_ic(tests.size());
        std::vector<std::string> blown(tests.size());
        std::vector<std::exception_ptr> errors(tests.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (long long i = 0; i < static_cast<long long>(tests.size()); ++i) {
            const auto k = static_cast<std::size_t>(i);
            try {
                const Trajectory tr = run_solver(cfg, pde, tests[k], (seed << 32) | k);
                per_ic[k] = relative_errors(tr.frames, tests[k].reference.frames);
            } catch (const Blowup& b) {
                blown[k] = b.what();
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
        nlohmann::json row{{"seed", seed}};
        std::string failure;
        for (const auto& b : blown)
            if (!b.empty()) failure = b;
        if (!failure.empty()) {
            rep.blowup = true;
            row["blowup"] = true;
            row["message"] = failure;
            row["e_l2"] = nullptr;
            row["e_linf"] = nullptr;
        } else {
            double l2 = 0.0, linf = 0.0;
            std::vector<double> fl2(frame_l2.size(), 0.0), flinf(frame_l2.size(), 0.0);
            for (const auto& e : per_ic) {
                l2 += e.mean_l2;
                linf += e.mean_linf;
                for (std::size_t f = 0; f < fl2.size(); ++f) {
                    fl2[f] += e.l2[f] / static_cast<double>(per_ic.size());
                    flinf[f] += e.linf[f] / static_cast<double>(per_ic.size());
                }
            }
            l2 /= static_cast<double>(per_ic.size());
            linf /= static_cast<double>(per_ic.size());
            row["blowup"] = false;
            row["e_l2"] = l2;
            row["e_linf"] = linf;
            row["frame_l2"] = fl2;
            row["frame_linf"] = flinf;
            l2s.push_back(l2);
            linfs.push_back(linf);
            for (std::size_t f = 0; f < fl2.size(); ++f) {
                frame_l2[f] += fl2[f];
                frame_linf[f] += flinf[f];
            }
            ++curves;
        }
        rows.push_back(row);
        seed_times.push_back({{"seed", seed}, {"seconds", seconds_since(ts)}});
    }
    for (std::size_t f = 0; f < frame_l2.size(); ++f) {
        frame_l2[f] = curves > 0 ? frame_l2[f] / curves : std::nan("");
        frame_linf[f] = curves > 0 ? frame_linf[f] / curves : std::nan("");
    }
    const auto [ml2, sl2] = mean_std(l2s);
    const auto [mli, sli] = mean_std(linfs);
    rep.payload = {{"config", cfg.to_json()},
                   {"pde", pde_to_json(pde)},
                   {"desk_scale", !cfg.paper_scale},
                   {"reference",
                    {{"resolution", cfg.effective_ref_resolution()},
                     {"steps", cfg.effective_ref_steps()}}},
                   {"rows", rows},
                   {"blowup", rep.blowup},
                   {"mean_l2", ml2},
                   {"std_l2", sl2},
                   {"mean_linf", mli},
                   {"std_linf", sli},
                   {"frame_l2", frame_l2},
                   {"frame_linf", frame_linf}};
    rep.timings["seeds"] = seed_times;
    rep.timings["total_seconds"] = seconds_since(t0);
    return rep;
}

nlohmann::json Report::to_json() const { return {{"payload", payload}, {"timings", timings}}; }

std::string Report::frame_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "frame,e_l2,e_linf\n";
    const auto& l2 = payload.at("frame_l2");
    const auto& li = payload.at("frame_linf");
    auto num = [](const nlohmann::json& v) { return v.is_number() ? v.get<double>() : std::nan(""); };
    for (std::size_t f = 0; f < l2.size(); ++f)
        os << (f + 1) << ',' << num(l2[f]) << ',' << num(li[f]) << '\n';
    return os.str();
}

}  // namespace fk
