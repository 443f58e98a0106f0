#include "cbf/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cbf/spectral.hpp"

namespace cbf::io {

namespace {

constexpr char kMagic[4] = {'C', 'B', 'F', 'F'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_f64(std::ostream& os, double v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
double get_f64(std::istream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

void write_header(std::ostream& os, int d, int n, double L, int ncomp, bool spectral) {
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, static_cast<std::uint32_t>(d));
    put_u32(os, static_cast<std::uint32_t>(n));
    put_f64(os, L);
    put_u32(os, static_cast<std::uint32_t>(ncomp));
    put_u32(os, spectral ? 1u : 0u);
}

struct Header {
    int d, n, ncomp;
    double L;
    bool spectral;
};

Header read_header(std::istream& is, const std::string& path) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("snapshot: bad magic in " + path);
    std::uint32_t version = get_u32(is);
    if (version != kVersion)
        throw std::runtime_error("snapshot: unsupported version in " + path);
    Header h;
    h.d = static_cast<int>(get_u32(is));
    h.n = static_cast<int>(get_u32(is));
    h.L = get_f64(is);
    h.ncomp = static_cast<int>(get_u32(is));
    h.spectral = get_u32(is) != 0;
    if (!is) throw std::runtime_error("snapshot: truncated header in " + path);
    return h;
}

void write_component(std::ostream& os, const ScalarField& s, bool spectral) {
    if (spectral) {
        const auto& sp = s.spectral();
        for (const auto& z : sp) {
            put_f64(os, z.real());
            put_f64(os, z.imag());
        }
    } else {
        const auto& ph = s.physical();
        os.write(reinterpret_cast<const char*>(ph.data()),
                 static_cast<std::streamsize>(ph.size() * sizeof(double)));
    }
}

ScalarField read_component(std::istream& is, const GridPtr& grid, bool spectral,
                           const std::string& path) {
    const std::size_t npts = grid->size();
    if (spectral) {
        std::vector<std::complex<double>> sp(npts);
        for (auto& z : sp) {
            double re = get_f64(is);
            double im = get_f64(is);
            z = {re, im};
        }
        if (!is) throw std::runtime_error("snapshot: truncated payload in " + path);
        return ScalarField::from_spectral(grid, std::move(sp));
    }
    std::vector<double> ph(npts);
    is.read(reinterpret_cast<char*>(ph.data()),
            static_cast<std::streamsize>(npts * sizeof(double)));
    if (!is) throw std::runtime_error("snapshot: truncated payload in " + path);
    return ScalarField::from_physical(grid, std::move(ph));
}

std::string snap_name(const char* prefix, std::size_t i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%05zu.cbff", prefix, i);
    return buf;
}

}  // namespace

void write_snapshot(const std::string& path, const VectorField& v, bool spectral) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("snapshot: cannot open " + path + " for writing");
    const TorusGrid& g = v.grid();
    write_header(os, g.d, g.n, g.L, v.dim(), spectral);
    for (int a = 0; a < v.dim(); ++a) write_component(os, v.comp(a), spectral);
    if (!os) throw std::runtime_error("snapshot: write failed for " + path);
}

void write_snapshot(const std::string& path, const ScalarField& s, bool spectral) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("snapshot: cannot open " + path + " for writing");
    const TorusGrid& g = s.grid();
    write_header(os, g.d, g.n, g.L, 1, spectral);
    write_component(os, s, spectral);
    if (!os) throw std::runtime_error("snapshot: write failed for " + path);
}

VectorField read_snapshot_vector(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("snapshot: cannot open " + path);
    Header h = read_header(is, path);
    if (h.ncomp != h.d)
        throw std::runtime_error("snapshot: expected vector field in " + path);
    GridPtr grid = make_grid(h.d, h.n, h.L);
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(h.ncomp));
    for (int a = 0; a < h.ncomp; ++a) comps.push_back(read_component(is, grid, h.spectral, path));
    return VectorField::from_components(std::move(comps));
}

ScalarField read_snapshot_scalar(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("snapshot: cannot open " + path);
    Header h = read_header(is, path);
    if (h.ncomp != 1) throw std::runtime_error("snapshot: expected scalar field in " + path);
    GridPtr grid = make_grid(h.d, h.n, h.L);
    return read_component(is, grid, h.spectral, path);
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("csv: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
}

void write_kv(const std::string& path,
              const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("kv: cannot open " + path);
    for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
}

std::vector<std::pair<std::string, std::string>> read_kv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("kv: cannot open " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    while (std::getline(is, line)) {
        auto pos = line.find('=');
        if (pos == std::string::npos) continue;
        auto trim = [](std::string s) {
            std::size_t a = s.find_first_not_of(" \t");
            std::size_t b = s.find_last_not_of(" \t\r");
            return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
        };
        out.emplace_back(trim(line.substr(0, pos)), trim(line.substr(pos + 1)));
    }
    return out;
}

void export_trajectory(const std::string& dir, const Trajectory& traj, const CbfParams& params) {
    std::filesystem::create_directories(dir);
    std::ofstream manifest(dir + "/manifest.txt");
    if (!manifest) throw std::runtime_error("export: cannot open manifest in " + dir);

    std::vector<std::vector<std::string>> diag;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::string name = snap_name("u", i);
        write_snapshot(dir + "/" + name, traj.snapshots[i]);
        manifest << i << " " << fmt(traj.times[i]) << " " << name << "\n";
        if (!traj.grad_p.empty())
            write_snapshot(dir + "/" + snap_name("gradp", i), traj.grad_p[i]);
        if (!traj.u_t.empty()) write_snapshot(dir + "/" + snap_name("ut", i), traj.u_t[i]);

        const VectorField& u = traj.snapshots[i];
        diag.push_back({std::to_string(i), fmt(traj.times[i]), fmt(norm_l2(u)),
                        fmt(norm_h1_semi(u)), fmt(norm_lp(u, params.r + 1.0)),
                        fmt(norm_linf(u)), fmt(divergence_max_spectral(u))});
    }
    write_csv(dir + "/diagnostics.csv",
              {"index", "time", "norm_H", "norm_gradH", "norm_Lrp1", "norm_inf", "div_max"},
              diag);
}

Trajectory import_trajectory(const std::string& dir) {
    std::ifstream manifest(dir + "/manifest.txt");
    if (!manifest) throw std::runtime_error("import: cannot open manifest in " + dir);
    Trajectory traj;
    std::string line;
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::size_t idx;
        double t;
        std::string name;
        if (!(ss >> idx >> t >> name))
            throw std::runtime_error("import: malformed manifest line '" + line + "'");
        traj.times.push_back(t);
        traj.snapshots.push_back(read_snapshot_vector(dir + "/" + name));
        std::string gp = dir + "/" + snap_name("gradp", idx);
        if (std::filesystem::exists(gp)) traj.grad_p.push_back(read_snapshot_vector(gp));
        std::string ut = dir + "/" + snap_name("ut", idx);
        if (std::filesystem::exists(ut)) traj.u_t.push_back(read_snapshot_vector(ut));
    }
    if (traj.times.empty()) throw std::runtime_error("import: empty trajectory in " + dir);
    return traj;
}

void write_ledger_csv(const std::string& path, const EnergyLedger& led) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < led.times.size(); ++i)
        rows.push_back({fmt(led.times[i]), fmt(led.u_h[i]), fmt(led.u_grad[i]),
                        fmt(led.u_lrp1[i]), fmt(led.ut_h[i]), fmt(led.lap_h[i]),
                        fmt(led.mix[i]), fmt(led.u_linf[i]), fmt(led.div_max[i]),
                        fmt(led.int_grad2[i]), fmt(led.int_u2[i]), fmt(led.int_lrp1[i]),
                        fmt(led.int_ut2[i]), fmt(led.int_lap2[i]), fmt(led.int_mix[i])});
    write_csv(path,
              {"time", "u_H", "grad_u_H", "u_Lrp1", "ut_H", "lap_u_H", "mix", "u_inf",
               "div_max", "int_grad2", "int_u2", "int_lrp1", "int_ut2", "int_lap2", "int_mix"},
              rows);
}

void write_verdicts_csv(const std::string& path, const std::vector<LemmaVerdict>& verdicts) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& v : verdicts)
        rows.push_back({v.lemma, v.regime, fmt(v.lhs), fmt(v.rhs), fmt(v.slack),
                        v.pass ? "1" : "0", v.applicable ? "1" : "0",
                        v.ratio_form ? "1" : "0", v.note});
    write_csv(path,
              {"lemma_id", "regime", "lhs", "rhs", "slack", "pass", "applicable", "ratio_form",
               "note"},
              rows);
}

void write_inverse_report(const std::string& dir, const InverseResult& res) {
    std::filesystem::create_directories(dir);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < res.residual_history.size(); ++i)
        rows.push_back({std::to_string(i), fmt(res.residual_history[i]),
                        fmt(res.fnorm_history[i]), res.scaled[i] ? "1" : "0"});
    write_csv(dir + "/report.csv", {"iter", "residual", "f_norm", "scaled"}, rows);

    std::ofstream timing(dir + "/timing.txt");
    for (std::size_t i = 0; i < res.forward_seconds.size(); ++i)
        timing << i << " " << res.forward_seconds[i] << "\n";

    write_kv(dir + "/solve.txt",
             {{"iterations", std::to_string(res.iterations)},
              {"converged", res.converged ? "1" : "0"},
              {"blew_up", res.blew_up ? "1" : "0"},
              {"ball_active", res.ball_active ? "1" : "0"},
              {"ball_radius", fmt(res.ball_radius)},
              {"ever_scaled", res.ever_scaled ? "1" : "0"}});
}

void write_admissibility(const std::string& path, const AdmissibilityReport& rep) {
    write_kv(path, {{"g_T", fmt(rep.g_T)},
                    {"cond_1e", rep.cond_1e ? "1" : "0"},
                    {"regime", rep.regime},
                    {"regime_lhs", fmt(rep.regime_lhs)},
                    {"regime_rhs", fmt(rep.regime_rhs)},
                    {"regime_ok", rep.regime_ok ? "1" : "0"},
                    {"cond_41", rep.cond_41 ? "1" : "0"},
                    {"M_defined", rep.M_defined ? "1" : "0"},
                    {"M", rep.M_defined ? fmt(rep.M) : "undefined"},
                    {"M_note", rep.M_note.empty() ? "-" : rep.M_note},
                    {"has_T_bound", rep.has_T_bound ? "1" : "0"},
                    {"example_T_bound", fmt(rep.example_T_bound)}});
}

void write_stability_csv(const std::string& path, const StabilityTable& table) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : table.rows)
        rows.push_back({fmt(r.delta), r.valid ? "1" : "0", fmt(r.f_err), fmt(r.u_sup_err),
                        fmt(r.u_grad_int), fmt(r.u_lrp1_int), fmt(r.p_proxy), fmt(r.d_u0),
                        fmt(r.d_g), fmt(r.d_gt), fmt(r.d_grad_phi), fmt(r.d_psi_lap),
                        fmt(r.data_pow_sum), fmt(r.data_sum),
                        r.invalid_reason.empty() ? "-" : r.invalid_reason});
    write_csv(path,
              {"delta", "valid", "f_err", "u_sup_err", "u_grad_int", "u_lrp1_int", "p_proxy",
               "d_u0", "d_g", "d_gt", "d_grad_phi", "d_psi_lap", "data_pow_sum", "data_sum",
               "note"},
              rows);
}

}  // namespace cbf::io
