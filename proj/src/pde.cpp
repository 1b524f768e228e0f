#include "fk/pde.hpp"

#include <cmath>
#include <numbers>

#include "fk/error.hpp"
#include "fk/fft.hpp"
#include "fk/spectral.hpp"

namespace fk {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
}  // namespace

std::string_view to_string(ForcingKind kind) {
    switch (kind) {
    case ForcingKind::None: return "none";
    case ForcingKind::Li: return "li";
    case ForcingKind::Kolmogorov: return "kolmogorov";
    case ForcingKind::Reaction: return "reaction";
    }
    return "none";
}

ForcingKind parse_forcing(std::string_view text) {
    if (text == "none") return ForcingKind::None;
    if (text == "li") return ForcingKind::Li;
    if (text == "kolmogorov") return ForcingKind::Kolmogorov;
    if (text == "reaction") return ForcingKind::Reaction;
    throw FormatError("unknown forcing '" + std::string(text) + "'");
}

std::string PdeSpec::name() const {
    return std::visit(overloaded{[](const ConvectionDiffusion&) { return std::string("convdiff"); },
                                 [](const AllenCahn&) { return std::string("allen_cahn"); },
                                 [](const NavierStokesVorticity&) {
                                     return std::string("navier_stokes");
                                 }},
                      model);
}

double PdeSpec::diffusivity() const {
    return std::visit(overloaded{[](const ConvectionDiffusion& m) { return m.kappa; },
                                 [](const AllenCahn& m) { return m.kappa; },
                                 [](const NavierStokesVorticity& m) { return m.nu; }},
                      model);
}

bool PdeSpec::linear() const { return std::holds_alternative<ConvectionDiffusion>(model); }

ForcingKind PdeSpec::forcing() const {
    return std::visit(overloaded{[](const ConvectionDiffusion&) { return ForcingKind::None; },
                                 [](const AllenCahn&) { return ForcingKind::Reaction; },
                                 [](const NavierStokesVorticity& m) { return m.forcing; }},
                      model);
}

void PdeSpec::validate() const {
    if (!(horizon > 0.0)) throw InvalidArgument("horizon T must be positive");
    if (frames < 1) throw InvalidArgument("frames must be >= 1");
    if (N < 1) throw InvalidArgument("N must be >= 1");
    std::visit(overloaded{
                   [&](const ConvectionDiffusion& m) {
                       if (!(m.kappa >= 0.0)) throw InvalidArgument("kappa must be >= 0");
                       if (grid.dim() != 1) throw InvalidArgument("convdiff is a 1D problem");
                       // Bounded grids only for pure diffusion: a backtrace
                       // never leaves the interval then.
                       if (!grid.periodic() && m.beta != 0.0)
                           throw InvalidArgument("convdiff with beta != 0 needs a periodic grid");
                   },
                   [&](const AllenCahn& m) {
                       if (!(m.kappa > 0.0)) throw InvalidArgument("kappa must be positive");
                       if (grid.dim() != 1 || grid.periodic())
                           throw InvalidArgument("Allen-Cahn needs a bounded 1D grid");
                   },
                   [&](const NavierStokesVorticity& m) {
                       if (!(m.nu > 0.0)) throw InvalidArgument("nu must be positive");
                       if (grid.dim() != 2 || !grid.periodic())
                           throw InvalidArgument("Navier-Stokes needs a periodic 2D grid");
                       if (m.forcing == ForcingKind::Reaction)
                           throw InvalidArgument("Navier-Stokes forcing must be li, kolmogorov or none");
                   }},
               model);
}

PdeSpec convdiff_case(int e) {
    static constexpr double kappa[4] = {0.005, 0.01, 0.005, 0.01};
    static constexpr int freq[4] = {5, 5, 10, 10};
    if (e < 1 || e > 4) throw InvalidArgument("case index must be 1..4");
    PdeSpec p;
    p.model = ConvectionDiffusion{0.1, kappa[e - 1]};
    p.grid = make_grid(1, 64, 1.0, BoundaryKind::Periodic);
    p.horizon = 2.0;
    p.N = freq[e - 1];
    return p;
}

PdeSpec allen_cahn_case(int e) {
    if (e < 1 || e > 4) throw InvalidArgument("case index must be 1..4");
    PdeSpec p;
    p.model = AllenCahn{0.01};
    p.grid = make_grid(1, 65, 1.0,
                       e <= 2 ? BoundaryKind::DirichletZero : BoundaryKind::NeumannZero);
    p.horizon = 1.0;
    p.N = (e % 2 == 1) ? 5 : 10;
    return p;
}

PdeSpec navier_stokes_case(int e, int resolution) {
    if (e < 1 || e > 4) throw InvalidArgument("case index must be 1..4");
    PdeSpec p;
    p.model = NavierStokesVorticity{(e % 2 == 1) ? 1e-4 : 1e-5,
                                    e <= 2 ? ForcingKind::Li : ForcingKind::Kolmogorov};
    p.grid = make_grid(2, resolution, 1.0, BoundaryKind::Periodic);
    p.horizon = 10.0;
    return p;
}

Field velocity_from_vorticity(const Field& omega) {
    const Grid& g = omega.grid();
    if (g.dim() != 2 || !g.periodic())
        throw InvalidArgument("velocity_from_vorticity needs a periodic 2D field");
    const int n0 = g.resolution(0);
    const int n1 = g.resolution(1);
    RealFft fft({n0, n1});
    const int h1 = fft.half_length();
    std::vector<std::complex<double>> w(fft.spectrum_size());
    std::vector<std::complex<double>> a(fft.spectrum_size());
    std::vector<std::complex<double>> b(fft.spectrum_size());
    fft.forward(omega.component(0), w);
    const double inv_n = 1.0 / static_cast<double>(fft.real_size());
    const std::complex<double> I(0.0, 1.0);
    for (int i = 0; i < n0; ++i) {
        const int k0 = wavenumber(i, n0);
        const double q0 = two_pi * k0 / g.extent(0);
        const bool nyq0 = n0 % 2 == 0 && i == n0 / 2;
        for (int j = 0; j < h1; ++j) {
            const double q1 = two_pi * j / g.extent(1);
            const bool nyq1 = n1 % 2 == 0 && j == n1 / 2;
            const std::size_t idx = static_cast<std::size_t>(i) * h1 + j;
            const double lap = q0 * q0 + q1 * q1;
            const std::complex<double> psi = lap > 0.0 ? w[idx] / lap : 0.0;
            // u1 = d psi / dx2, u2 = -d psi / dx1
            a[idx] = nyq1 ? 0.0 : I * q1 * psi * inv_n;
            b[idx] = nyq0 ? 0.0 : -I * q0 * psi * inv_n;
        }
    }
    Field u(g, 2);
    fft.inverse(a, u.component(0));
    fft.inverse(b, u.component(1));
    return u;
}

Field drift(const PdeSpec& pde, const Field& state) {
    const Grid& g = pde.grid;
    return std::visit(overloaded{
                          [&](const ConvectionDiffusion& m) {
                              Field d(g, g.dim());
                              std::fill(d.values().begin(), d.values().end(), m.beta);
                              return d;
                          },
                          [&](const AllenCahn&) { return Field(g, g.dim()); },
                          [&](const NavierStokesVorticity&) {
                              Field u = velocity_from_vorticity(state);
                              for (double& v : u.values()) v = -v;
                              return u;
                          }},
                      pde.model);
}

namespace {

double reaction(double u) { return u - u * u * u; }

double fixed_forcing(ForcingKind kind, const Point& x) {
    switch (kind) {
    case ForcingKind::Li: {
        const double s = two_pi * (x[0] + x[1]);
        return 0.1 * std::sin(s) + 0.1 * std::cos(s);
    }
    case ForcingKind::Kolmogorov: return 0.1 * std::cos(4.0 * two_pi * x[0]);
    default: return 0.0;
    }
}

}  // namespace

double forcing_value(const PdeSpec& pde, const Point& x, double, const Field* state) {
    const ForcingKind kind = pde.forcing();
    if (kind == ForcingKind::Reaction) {
        if (!state) throw InvalidArgument("reaction forcing needs a state field");
        return reaction(OffGridSampler(*state)(x));
    }
    return fixed_forcing(kind, x);
}

Field forcing_field(const PdeSpec& pde, const Field& state, double) {
    const Grid& g = pde.grid;
    Field f(g);
    const ForcingKind kind = pde.forcing();
    if (kind == ForcingKind::None) return f;
    for (std::size_t p = 0; p < g.size(); ++p)
        f[p] = kind == ForcingKind::Reaction ? reaction(state[p]) : fixed_forcing(kind, g.point(p));
    return f;
}

nlohmann::json pde_to_json(const PdeSpec& pde) {
    nlohmann::json j;
    j["pde"] = pde.name();
    std::visit(overloaded{[&](const ConvectionDiffusion& m) {
                              j["beta"] = m.beta;
                              j["kappa"] = m.kappa;
                          },
                          [&](const AllenCahn& m) { j["kappa"] = m.kappa; },
                          [&](const NavierStokesVorticity& m) {
                              j["nu"] = m.nu;
                              j["forcing"] = std::string(to_string(m.forcing));
                          }},
               pde.model);
    j["boundary"] = std::string(to_string(pde.grid.boundary()));
    j["grid"] = pde.grid.resolution(0);
    j["extent"] = pde.grid.extent(0);
    j["T"] = pde.horizon;
    j["frames"] = pde.frames;
    j["N"] = pde.N;
    return j;
}

namespace {

Config json_to_config(const nlohmann::json& j) {
    Config c;
    for (const auto& [k, v] : j.items()) {
        if (v.is_string())
            c.set(k, v.get<std::string>());
        else
            c.set(k, v.dump());
    }
    return c;
}

}  // namespace

PdeSpec pde_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw FormatError("pde descriptor must be a JSON object");
    return pde_from_config(json_to_config(j));
}

const std::set<std::string>& pde_config_keys() {
    static const std::set<std::string> keys{"pde",  "beta", "kappa",  "nu", "forcing", "boundary",
                                            "grid", "T",    "frames", "N",  "extent"};
    return keys;
}

PdeSpec pde_from_config(const Config& cfg) {
    const std::string kind = cfg.get("pde");
    PdeSpec p;
    const double extent = cfg.get_double("extent", 1.0);
    if (kind == "convdiff") {
        p.model = ConvectionDiffusion{cfg.get_double("beta", 0.1), cfg.get_double("kappa", 0.005)};
        p.grid = make_grid(1, cfg.get_int("grid", 64), extent,
                           parse_boundary(cfg.get("boundary", "periodic")));
        p.horizon = cfg.get_double("T", 2.0);
    } else if (kind == "allen_cahn") {
        p.model = AllenCahn{cfg.get_double("kappa", 0.01)};
        p.grid = make_grid(1, cfg.get_int("grid", 65), extent,
                           parse_boundary(cfg.get("boundary", "dirichlet")));
        p.horizon = cfg.get_double("T", 1.0);
    } else if (kind == "navier_stokes") {
        p.model = NavierStokesVorticity{cfg.get_double("nu", 1e-4),
                                        parse_forcing(cfg.get("forcing", "li"))};
        p.grid = make_grid(2, cfg.get_int("grid", 64), extent,
                           parse_boundary(cfg.get("boundary", "periodic")));
        p.horizon = cfg.get_double("T", 10.0);
    } else {
        throw FormatError("unknown pde '" + kind + "'");
    }
    p.frames = cfg.get_int("frames", 10);
    p.N = cfg.get_int("N", 5);
    try {
        p.validate();
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("invalid pde: ") + e.what());
    }
    return p;
}

}  // namespace fk
