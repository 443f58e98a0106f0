#include "cbf/manufacture.hpp"

#include <filesystem>

#include "cbf/io.hpp"
#include "cbf/spectral.hpp"

namespace cbf {

Manufactured manufacture(const GridPtr& grid, const CbfParams& params, double T, int nt,
                         const VectorField& u0, const VectorField& f_star, const Modulation& g,
                         const RecordPolicy& rec) {
    Manufactured m;
    m.f_star = leray_project(dealias(f_star));
    VectorField u0p = leray_project(dealias(u0));
    m.trajectory = solve_forward(u0p, m.f_star, g, params, T, nt, rec);

    const VectorField& uT = m.trajectory.final_state();
    m.problem.grid = grid;
    m.problem.params = params;
    m.problem.T = T;
    m.problem.g = g;
    m.problem.u0 = u0p;
    m.problem.phi = uT;
    m.problem.grad_psi = pressure_gradient(uT, m.f_star, g.eval(grid, T), params);
    m.admissibility = check_admissibility(m.problem);
    return m;
}

Manufactured manufacture_from_config(const RunConfig& cfg) {
    GridPtr grid = build_grid(cfg);
    Modulation g = build_g(cfg, grid);
    VectorField u0 = build_field(cfg.u0_src, grid, /*project=*/true, cfg.seed);
    VectorField f = build_field(cfg.f_src, grid, /*project=*/true, cfg.seed + 1);
    return manufacture(grid, cfg.params, cfg.T, cfg.nt, u0, f, g,
                       build_record_policy(cfg, /*grad_p=*/false, /*u_t=*/false));
}

void write_manufactured(const std::string& dir, const Manufactured& m) {
    std::filesystem::create_directories(dir);
    io::write_snapshot(dir + "/u0.cbff", m.problem.u0);
    io::write_snapshot(dir + "/f_star.cbff", m.f_star);
    io::write_snapshot(dir + "/phi.cbff", m.problem.phi);
    io::write_snapshot(dir + "/grad_psi.cbff", m.problem.grad_psi);
    io::write_admissibility(dir + "/admissibility.txt", m.admissibility);
    io::write_kv(dir + "/problem.txt",
                 {{"d", std::to_string(m.problem.params.d)},
                  {"n", std::to_string(m.problem.grid->n)},
                  {"L", io::fmt(m.problem.grid->L)},
                  {"T", io::fmt(m.problem.T)},
                  {"mu", io::fmt(m.problem.params.mu)},
                  {"alpha", io::fmt(m.problem.params.alpha)},
                  {"beta", io::fmt(m.problem.params.beta)},
                  {"r", io::fmt(m.problem.params.r)},
                  {"files", "u0.cbff f_star.cbff phi.cbff grad_psi.cbff"}});
}

}  // namespace cbf
