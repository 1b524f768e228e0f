#include "fk/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fk/error.hpp"
#include "fk/spectral.hpp"

namespace fk {

double diffusion_scale(const PdeSpec& pde, double dt) {
    return std::sqrt(2.0 * pde.diffusivity() * dt);
}

namespace {

struct KernelPlan {
    int factor = 1;
    Grid working;
    std::vector<TransitionKernel> kernels;
    double max_defect = 0.0;
};

bool on_dirichlet_edge(const Grid& g, std::size_t p) {
    if (g.boundary() != BoundaryKind::DirichletZero) return false;
    const Point x = g.point(p);
    for (int a = 0; a < g.dim(); ++a)
        if (x[a] == 0.0 || x[a] == g.extent(a)) return true;
    return false;
}

std::vector<Point> backtrace_all(const Grid& g, const Field& beta_end, const Field& beta_start,
                                 const PropagatorConfig& cfg, PropagationDiagnostics* diag) {
    const OffGridSampler se(beta_end);
    const OffGridSampler ss(beta_start);
    std::vector<Point> xi(g.size());
    const auto n = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
    for (long long p = 0; p < n; ++p)
        xi[static_cast<std::size_t>(p)] =
            heun_backtrace(g.point(static_cast<std::size_t>(p)), se, ss, cfg.dt, cfg.drift);

    if (diag) {
        double m = 0.0;
        const std::size_t np = g.size();
        for (std::size_t p = 0; p < np; ++p) {
            double s = 0.0;
            for (int a = 0; a < g.dim(); ++a) {
                const double b = beta_end.component(a)[p];
                s += b * b;
            }
            m = std::max(m, std::sqrt(s) * cfg.dt);
        }
        diag->max_drift_step = std::max(diag->max_drift_step, m);
        if (m > g.extent(0) / 4.0) diag->cfl_advisory = true;
    }
    return xi;
}

std::vector<TransitionKernel> kernels_on(const Grid& working, const Grid& g,
                                         const std::vector<Point>& xi, double sigma,
                                         const PropagatorConfig& cfg) {
    std::vector<TransitionKernel> ks(xi.size());
    const auto n = static_cast<long long>(xi.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (long long p = 0; p < n; ++p) {
        const auto q = static_cast<std::size_t>(p);
        if (on_dirichlet_edge(g, q)) {
            ks[q].source = xi[q];
            ks[q].absorbed_mass = 1.0;
            continue;
        }
        ks[q] = sigma > 0.0 ? transition_kernel(working, xi[q], sigma, cfg)
                            : interpolation_kernel(working, xi[q]);
    }
    return ks;
}

KernelPlan plan_kernels(const Grid& g, const std::vector<Point>& xi, double sigma,
                        const PropagatorConfig& cfg) {
    KernelPlan plan;
    if (!(sigma > 0.0)) {
        plan.working = g;
        plan.kernels = kernels_on(g, g, xi, sigma, cfg);
        return plan;
    }
    const double tol = cfg.tolerance();
    for (int factor = 1;; factor *= 2) {
        plan.factor = factor;
        plan.working = g.refined(factor);
        plan.kernels = kernels_on(plan.working, g, xi, sigma, cfg);
        plan.max_defect = 0.0;
        for (const auto& k : plan.kernels) plan.max_defect = std::max(plan.max_defect, k.defect());
        if (cfg.interpolation == Interpolation::Off) break;
        bool coarse = false;
        for (int a = 0; a < g.dim(); ++a) coarse = coarse || plan.working.spacing(a) > 0.5 * sigma;
        if (!coarse && plan.max_defect <= tol) break;
        if (factor * 2 > cfg.upsample_cap) break;
    }
    if (cfg.interpolation == Interpolation::Auto && plan.max_defect > tol)
        throw NormalizationFailure("kernel normalization outside tolerance at the upsample cap",
                                   plan.max_defect, plan.factor);
    return plan;
}

void record(PropagationDiagnostics* diag, const KernelPlan& plan) {
    if (!diag) return;
    diag->factor = std::max(diag->factor, plan.factor);
    diag->max_defect = std::max(diag->max_defect, plan.max_defect);
    diag->passes += 1;
}

double dot(const TransitionKernel& k, std::span<const double> v) {
    double acc = 0.0;
    for (std::size_t q = 0; q < k.index.size(); ++q) acc += k.weight[q] * v[k.index[q]];
    return acc;
}

// One pass of the nonlinear step with the drift and forcing endpoints given.
Field nonlinear_pass(const PdeSpec& pde, const Field& u, const Field& beta_end,
                     const Field& beta_start, const Field* f_start, const Field* f_end,
                     const PropagatorConfig& cfg, PropagationDiagnostics* diag) {
    const Grid& g = pde.grid;
    const double sigma = diffusion_scale(pde, cfg.dt);
    const auto xi = backtrace_all(g, beta_end, beta_start, cfg, diag);
    const KernelPlan plan = plan_kernels(g, xi, sigma, cfg);
    record(diag, plan);

    const Field uw = plan.factor > 1 ? spectral_interpolate(u, plan.factor, cfg.upsample_cap) : u;
    Field fw;
    if (f_start)
        fw = plan.factor > 1 ? spectral_interpolate(*f_start, plan.factor, cfg.upsample_cap)
                             : *f_start;

    Field out(g);
    const auto n = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
    for (long long pp = 0; pp < n; ++pp) {
        const auto p = static_cast<std::size_t>(pp);
        if (on_dirichlet_edge(g, p)) {
            out[p] = 0.0;
            continue;
        }
        const auto& k = plan.kernels[p];
        double v = dot(k, uw.values());
        if (f_start) v += 0.5 * cfg.dt * ((*f_end)[p] + dot(k, fw.values()));
        out[p] = v;
    }
    return out;
}

}  // namespace

SparseOperator assemble_linear_operator(const PdeSpec& pde, const PropagatorConfig& cfg,
                                        PropagationDiagnostics* diag) {
    cfg.validate();
    if (!pde.linear())
        throw InvalidArgument(pde.name() +
                              " has state-dependent drift or forcing; it cannot be exported as a "
                              "linear operator. Use the propagation service (fk serve, op "
                              "PROPAGATE) instead.");
    const Grid& g = pde.grid;
    const Field zero(g);
    const Field beta = drift(pde, zero);
    const auto xi = backtrace_all(g, beta, beta, cfg, diag);
    const double sigma = diffusion_scale(pde, cfg.dt);
    const KernelPlan plan = plan_kernels(g, xi, sigma, cfg);
    record(diag, plan);

    SparseOperator op;
    op.grid = g;
    op.dt = cfg.dt;
    op.pde = pde_to_json(pde);
    op.forcing.assign(g.size(), 0.0);

    // Columns of the band-limited interpolation from g to the working grid.
    std::vector<double> interp;
    const std::size_t P = g.size();
    const std::size_t Pw = plan.working.size();
    if (plan.factor > 1) {
        interp.assign(Pw * P, 0.0);
        for (std::size_t j = 0; j < P; ++j) {
            Field e(g);
            e[j] = 1.0;
            const Field col = spectral_interpolate(e, plan.factor, cfg.upsample_cap);
            for (std::size_t i = 0; i < Pw; ++i) interp[i * P + j] = col[i];
        }
    }
    std::vector<double> dense(P);
    for (std::size_t p = 0; p < P; ++p) {
        const auto& k = plan.kernels[p];
        if (!on_dirichlet_edge(g, p)) {
            if (plan.factor == 1) {
                for (std::size_t q = 0; q < k.index.size(); ++q) {
                    op.col.push_back(static_cast<std::uint32_t>(k.index[q]));
                    op.weight.push_back(k.weight[q]);
                }
            } else {
                std::fill(dense.begin(), dense.end(), 0.0);
                for (std::size_t q = 0; q < k.index.size(); ++q) {
                    const double* row = interp.data() + k.index[q] * P;
                    for (std::size_t j = 0; j < P; ++j) dense[j] += k.weight[q] * row[j];
                }
                for (std::size_t j = 0; j < P; ++j) {
                    if (dense[j] == 0.0) continue;
                    op.col.push_back(static_cast<std::uint32_t>(j));
                    op.weight.push_back(dense[j]);
                }
            }
        }
        op.row_ptr.push_back(op.weight.size());
    }
    return op;
}

Field propagate(const Field& u, const PdeSpec& pde, double t, const PropagatorConfig& cfg,
                PropagationDiagnostics* diag) {
    cfg.validate();
    if (!(u.grid() == pde.grid)) throw InvalidArgument("field grid does not match the pde grid");
    if (pde.linear()) return assemble_linear_operator(pde, cfg, diag).apply(u);

    const bool forced = pde.forcing() != ForcingKind::None;
    const Field beta_start = drift(pde, u);
    Field f_start;
    if (forced) f_start = forcing_field(pde, u, t);

    const Field predictor = nonlinear_pass(pde, u, beta_start, beta_start, forced ? &f_start : nullptr,
                                           forced ? &f_start : nullptr, cfg, diag);
    const Field beta_end = drift(pde, predictor);
    Field f_end;
    if (forced) f_end = forcing_field(pde, predictor, t + cfg.dt);
    Field out = nonlinear_pass(pde, u, beta_end, beta_start, forced ? &f_start : nullptr,
                               forced ? &f_end : nullptr, cfg, diag);
    if (!out.all_finite()) throw Blowup("propagate produced non-finite values", 0, t + cfg.dt);
    return out;
}

Field mc_propagate(const Field& u, const PdeSpec& pde, double t, int M, std::uint64_t seed,
                   const PropagatorConfig& cfg) {
    cfg.validate();
    if (M < 1) throw InvalidArgument("particle count M must be >= 1");
    if (!(u.grid() == pde.grid)) throw InvalidArgument("field grid does not match the pde grid");
    const Grid& g = pde.grid;
    const int dim = g.dim();
    const double sigma = diffusion_scale(pde, cfg.dt);
    const Field beta = drift(pde, u);
    const bool forced = pde.forcing() != ForcingKind::None;
    Field f;
    if (forced) f = forcing_field(pde, u, t);
    const OffGridSampler sample(u);

    Field out(g);
    const auto n = static_cast<long long>(g.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (long long pp = 0; pp < n; ++pp) {
        const auto p = static_cast<std::size_t>(pp);
        std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(p >> 32)};
        std::mt19937_64 rng(sq);
        std::normal_distribution<double> normal;
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const Point x = g.point(p);
        Point start = x;
        for (int a = 0; a < dim; ++a) start[a] = x[a] + beta.component(a)[p] * cfg.dt;

        double mean = 0.0;
        for (int m = 0; m < M; ++m) {
            Point y = start;
            for (int a = 0; a < dim; ++a) y[a] += sigma * normal(rng);
            double value = 0.0;
            bool absorbed = false;
            switch (g.boundary()) {
            case BoundaryKind::Periodic: y = wrap_point(g, y); break;
            case BoundaryKind::NeumannZero:
                for (int a = 0; a < dim; ++a) {
                    const double L = g.extent(a);
                    double r = std::fmod(y[a], 2.0 * L);
                    if (r < 0.0) r += 2.0 * L;
                    y[a] = r > L ? 2.0 * L - r : r;
                }
                break;
            case BoundaryKind::DirichletZero: {
                double survive = 1.0;
                for (int a = 0; a < dim && !absorbed; ++a) {
                    const double L = g.extent(a);
                    if (y[a] <= 0.0 || y[a] >= L) {
                        absorbed = true;
                        break;
                    }
                    // Probability that the Brownian bridge between the two
                    // endpoints touched either wall.
                    if (sigma > 0.0) {
                        const double s2 = sigma * sigma;
                        const double lo = std::exp(-2.0 * start[a] * y[a] / s2);
                        const double hi = std::exp(-2.0 * (L - start[a]) * (L - y[a]) / s2);
                        survive *= std::max(0.0, 1.0 - lo - hi);
                    }
                }
                if (!absorbed && survive < 1.0) absorbed = unif(rng) >= survive;
                break;
            }
            }
            if (!absorbed) value = sample(y);
            mean += (value - mean) / static_cast<double>(m + 1);
        }
        out[p] = mean + (forced ? f[p] : 0.0) * cfg.dt;
    }
    return out;
}

}  // namespace fk
