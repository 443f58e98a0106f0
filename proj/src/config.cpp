#include "cbf/config.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "cbf/io.hpp"
#include "cbf/spectral.hpp"

namespace cbf {

namespace {

struct Parser {
    RunConfig cfg;
    std::vector<ConfigError> errors;

    void err(int line, const std::string& msg) { errors.push_back({line, msg}); }

    bool to_double(const std::string& v, double& out) {
        try {
            std::size_t pos = 0;
            out = std::stod(v, &pos);
            return pos == v.size();
        } catch (...) {
            return false;
        }
    }
    bool to_int(const std::string& v, int& out) {
        try {
            std::size_t pos = 0;
            out = std::stoi(v, &pos);
            return pos == v.size();
        } catch (...) {
            return false;
        }
    }
    bool to_u64(const std::string& v, std::uint64_t& out) {
        try {
            std::size_t pos = 0;
            out = std::stoull(v, &pos);
            return pos == v.size();
        } catch (...) {
            return false;
        }
    }

    void assign(int line, const std::string& key, const std::string& val) {
        auto num = [&](double& slot) {
            double x;
            if (to_double(val, x))
                slot = x;
            else
                err(line, "key '" + key + "': unparsable number '" + val + "'");
        };
        auto integer = [&](int& slot) {
            int x;
            if (to_int(val, x))
                slot = x;
            else
                err(line, "key '" + key + "': unparsable integer '" + val + "'");
        };
        auto u64 = [&](std::uint64_t& slot) {
            std::uint64_t x;
            if (to_u64(val, x))
                slot = x;
            else
                err(line, "key '" + key + "': unparsable seed '" + val + "'");
        };
        auto choice = [&](std::string& slot, std::initializer_list<const char*> allowed) {
            for (const char* a : allowed)
                if (val == a) {
                    slot = val;
                    return;
                }
            std::string opts;
            for (const char* a : allowed) opts += std::string(a) + "|";
            err(line, "key '" + key + "': value '" + val + "' not one of " + opts);
        };

        if (key == "mode")
            choice(cfg.mode, {"forward", "inverse", "verify", "sweep", "manufacture"});
        else if (key == "grid.d")
            integer(cfg.d);
        else if (key == "grid.n")
            integer(cfg.n);
        else if (key == "grid.L")
            num(cfg.L);
        else if (key == "params.mu")
            num(cfg.params.mu);
        else if (key == "params.alpha")
            num(cfg.params.alpha);
        else if (key == "params.beta")
            num(cfg.params.beta);
        else if (key == "params.r")
            num(cfg.params.r);
        else if (key == "time.T")
            num(cfg.T);
        else if (key == "time.nt")
            integer(cfg.nt);
        else if (key == "time.record")
            choice(cfg.record, {"landmarks", "all", "stride"});
        else if (key == "time.stride")
            integer(cfg.record_stride);
        else if (key == "data.u0")
            cfg.u0_src = val;
        else if (key == "data.f")
            cfg.f_src = val;
        else if (key == "data.phi")
            cfg.phi_src = val;
        else if (key == "data.grad_psi")
            cfg.grad_psi_src = val;
        else if (key == "g.kind")
            choice(cfg.g_kind, {"constant", "separable"});
        else if (key == "g.value")
            num(cfg.g_value);
        else if (key == "g.space")
            cfg.g_space = val;
        else if (key == "g.time")
            choice(cfg.g_time, {"one", "exp", "cos"});
        else if (key == "g.lambda")
            num(cfg.g_lambda);
        else if (key == "g.omega")
            num(cfg.g_omega);
        else if (key == "g.offset")
            num(cfg.g_offset);
        else if (key == "inverse.max_iters")
            integer(cfg.inv_max_iters);
        else if (key == "inverse.rel_tol")
            num(cfg.inv_rel_tol);
        else if (key == "inverse.theta")
            num(cfg.inv_theta);
        else if (key == "inverse.ball")
            choice(cfg.inv_ball, {"apriori", "unbounded", "user"});
        else if (key == "inverse.ball_radius")
            num(cfg.inv_ball_radius);
        else if (key == "inverse.start")
            choice(cfg.inv_start, {"zero", "random"});
        else if (key == "inverse.n")
            integer(cfg.inv_n);
        else if (key == "inverse.nt")
            integer(cfg.inv_nt);
        else if (key == "sweep.target")
            choice(cfg.sweep_target, {"u0", "phi", "grad_psi", "g", "g_t"});
        else if (key == "sweep.delta0")
            num(cfg.sweep_delta0);
        else if (key == "sweep.rungs")
            integer(cfg.sweep_rungs);
        else if (key == "sweep.ratio")
            num(cfg.sweep_ratio);
        else if (key == "sweep.seed")
            u64(cfg.sweep_seed);
        else if (key == "sweep.threads" || key == "threads")
            integer(cfg.threads);
        else if (key == "out")
            cfg.out_dir = val;
        else if (key == "seed")
            u64(cfg.seed);
        else
            err(line, "unknown key '" + key + "'");
    }

    void cross_validate() {
        if (cfg.mode.empty()) err(0, "missing required key 'mode'");
        if (cfg.d != 2 && cfg.d != 3) err(0, "grid.d must be 2 or 3");
        if (cfg.n < 8) err(0, "grid.n must be >= 8");
        if (cfg.n % 2 != 0) err(0, "grid.n must be even");
        if (!(cfg.L > 0.0)) err(0, "grid.L must be positive");
        if (!(cfg.params.mu > 0.0)) err(0, "params.mu must be positive");
        if (!(cfg.params.alpha > 0.0)) err(0, "params.alpha must be positive");
        if (!(cfg.params.beta > 0.0)) err(0, "params.beta must be positive");
        if (!(cfg.params.r >= 1.0)) err(0, "params.r must be >= 1");
        if (cfg.d == 3 && cfg.params.r < 3.0) err(0, "r >= 3 required for d = 3");
        if (!(cfg.T > 0.0)) err(0, "time.T must be positive");
        if (cfg.nt < 1) err(0, "time.nt must be >= 1");
        if (cfg.record == "stride" && cfg.record_stride < 1)
            err(0, "time.stride must be >= 1");
        if (!(cfg.inv_theta > 0.0 && cfg.inv_theta <= 1.0))
            err(0, "inverse.theta must lie in (0,1]");
        if (!(cfg.inv_rel_tol > 0.0)) err(0, "inverse.rel_tol must be positive");
        if (cfg.inv_max_iters < 1) err(0, "inverse.max_iters must be >= 1");
        if (cfg.inv_ball == "user" && !(cfg.inv_ball_radius > 0.0))
            err(0, "inverse.ball_radius must be positive in user mode");
        if (!(cfg.sweep_ratio > 0.0 && cfg.sweep_ratio < 1.0))
            err(0, "sweep.ratio must lie in (0,1)");
        if (cfg.sweep_rungs < 1) err(0, "sweep.rungs must be >= 1");
        if (cfg.threads < 1) err(0, "threads must be >= 1");

        if (cfg.mode == "inverse" || cfg.mode == "sweep") {
            if (cfg.phi_src.empty()) err(0, "mode '" + cfg.mode + "' requires data.phi");
            if (cfg.grad_psi_src.empty())
                err(0, "mode '" + cfg.mode + "' requires data.grad_psi");
        }

        for (const std::string* src :
             {&cfg.u0_src, &cfg.f_src, &cfg.phi_src, &cfg.grad_psi_src}) {
            if (src->rfind("path:", 0) == 0) {
                std::string p = src->substr(5);
                if (!std::filesystem::exists(p)) err(0, "referenced path does not exist: " + p);
            }
        }
        cfg.params.d = cfg.d;
        cfg.params.L = cfg.L;
    }
};

}  // namespace

LoadResult parse_config_text(const std::string& text) {
    Parser p;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string s) {
            std::size_t a = s.find_first_not_of(" \t\r");
            std::size_t b = s.find_last_not_of(" \t\r");
            return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
        };
        std::string t = trim(line);
        if (t.empty()) continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            p.err(lineno, "expected 'key = value', got '" + t + "'");
            continue;
        }
        p.assign(lineno, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    p.cross_validate();
    return {p.cfg, p.errors};
}

LoadResult load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) return {RunConfig{}, {{0, "cannot open config file " + path}}};
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& c) {
    using P = std::pair<std::string, std::string>;
    std::vector<P> kv;
    kv.emplace_back("mode", c.mode);
    kv.emplace_back("grid.d", std::to_string(c.d));
    kv.emplace_back("grid.n", std::to_string(c.n));
    kv.emplace_back("grid.L", io::fmt(c.L));
    kv.emplace_back("params.mu", io::fmt(c.params.mu));
    kv.emplace_back("params.alpha", io::fmt(c.params.alpha));
    kv.emplace_back("params.beta", io::fmt(c.params.beta));
    kv.emplace_back("params.r", io::fmt(c.params.r));
    kv.emplace_back("time.T", io::fmt(c.T));
    kv.emplace_back("time.nt", std::to_string(c.nt));
    kv.emplace_back("time.record", c.record);
    kv.emplace_back("time.stride", std::to_string(c.record_stride));
    kv.emplace_back("data.u0", c.u0_src);
    kv.emplace_back("data.f", c.f_src);
    kv.emplace_back("data.phi", c.phi_src);
    kv.emplace_back("data.grad_psi", c.grad_psi_src);
    kv.emplace_back("g.kind", c.g_kind);
    kv.emplace_back("g.value", io::fmt(c.g_value));
    kv.emplace_back("g.space", c.g_space);
    kv.emplace_back("g.time", c.g_time);
    kv.emplace_back("g.lambda", io::fmt(c.g_lambda));
    kv.emplace_back("g.omega", io::fmt(c.g_omega));
    kv.emplace_back("g.offset", io::fmt(c.g_offset));
    kv.emplace_back("inverse.max_iters", std::to_string(c.inv_max_iters));
    kv.emplace_back("inverse.rel_tol", io::fmt(c.inv_rel_tol));
    kv.emplace_back("inverse.theta", io::fmt(c.inv_theta));
    kv.emplace_back("inverse.ball", c.inv_ball);
    kv.emplace_back("inverse.ball_radius", io::fmt(c.inv_ball_radius));
    kv.emplace_back("inverse.start", c.inv_start);
    kv.emplace_back("inverse.n", std::to_string(c.inv_n));
    kv.emplace_back("inverse.nt", std::to_string(c.inv_nt));
    kv.emplace_back("sweep.target", c.sweep_target);
    kv.emplace_back("sweep.delta0", io::fmt(c.sweep_delta0));
    kv.emplace_back("sweep.rungs", std::to_string(c.sweep_rungs));
    kv.emplace_back("sweep.ratio", io::fmt(c.sweep_ratio));
    kv.emplace_back("sweep.seed", std::to_string(c.sweep_seed));
    kv.emplace_back("threads", std::to_string(c.threads));
    kv.emplace_back("out", c.out_dir);
    kv.emplace_back("seed", std::to_string(c.seed));
    return kv;
}

GridPtr build_grid(const RunConfig& cfg) { return make_grid(cfg.d, cfg.n, cfg.L); }

Modulation build_g(const RunConfig& cfg, const GridPtr& grid) {
    TimeProfile tp = TimeProfile::one();
    if (cfg.g_time == "exp") tp = TimeProfile::exponential(cfg.g_lambda);
    if (cfg.g_time == "cos") tp = TimeProfile::cos_plus(cfg.g_omega, cfg.g_offset);
    if (cfg.g_kind == "constant") {
        if (cfg.g_time == "one") return Modulation::constant(cfg.g_value);
        std::vector<double> vals(grid->size(), cfg.g_value);
        return Modulation::separable(ScalarField::from_physical(grid, std::move(vals)), tp);
    }
    return Modulation::separable(catalog::named_gspace(cfg.g_space, grid), tp);
}

VectorField build_field(const std::string& src, const GridPtr& grid, bool project,
                        std::uint64_t seed) {
    VectorField f;
    if (src.empty() || src == "zero") {
        f = VectorField::zero(grid);
    } else if (src.rfind("catalog:", 0) == 0) {
        f = catalog::named_field(src.substr(8), grid);
    } else if (src.rfind("path:", 0) == 0) {
        f = io::read_snapshot_vector(src.substr(5));
        if (f.grid().n != grid->n || f.grid().d != grid->d) f = resample(f, grid);
    } else if (src.rfind("random:", 0) == 0) {
        f = catalog::random_solenoidal(grid, std::stoi(src.substr(7)), seed);
    } else {
        throw std::invalid_argument("unknown field source '" + src + "'");
    }
    return project ? leray_project(dealias(f)) : f;
}

FixedPointConfig build_fp_config(const RunConfig& cfg) {
    FixedPointConfig fp;
    fp.max_iters = cfg.inv_max_iters;
    fp.rel_tol = cfg.inv_rel_tol;
    fp.theta = cfg.inv_theta;
    if (cfg.inv_ball == "apriori")
        fp.ball_mode = FixedPointConfig::BallMode::AprioriM;
    else if (cfg.inv_ball == "user")
        fp.ball_mode = FixedPointConfig::BallMode::User;
    else
        fp.ball_mode = FixedPointConfig::BallMode::Unbounded;
    fp.ball_radius_user = cfg.inv_ball_radius;
    fp.start = (cfg.inv_start == "random") ? FixedPointConfig::Start::RandomInBall
                                           : FixedPointConfig::Start::Zero;
    fp.seed = cfg.seed;
    fp.n = cfg.inv_n;
    fp.nt = (cfg.inv_nt > 0) ? cfg.inv_nt : cfg.nt;
    return fp;
}

PerturbationSpec build_perturbation(const RunConfig& cfg) {
    PerturbationSpec sp;
    if (cfg.sweep_target == "u0") sp.target = PerturbationSpec::Target::U0;
    if (cfg.sweep_target == "phi") sp.target = PerturbationSpec::Target::Phi;
    if (cfg.sweep_target == "grad_psi") sp.target = PerturbationSpec::Target::GradPsi;
    if (cfg.sweep_target == "g") sp.target = PerturbationSpec::Target::G;
    if (cfg.sweep_target == "g_t") sp.target = PerturbationSpec::Target::Gt;
    sp.delta0 = cfg.sweep_delta0;
    sp.rungs = cfg.sweep_rungs;
    sp.ratio = cfg.sweep_ratio;
    sp.seed = cfg.sweep_seed;
    return sp;
}

RecordPolicy build_record_policy(const RunConfig& cfg, bool grad_p, bool u_t) {
    if (cfg.record == "all") return RecordPolicy::every_step(grad_p, u_t);
    if (cfg.record == "stride") return RecordPolicy::strided(cfg.record_stride, grad_p, u_t);
    return RecordPolicy::landmarks(grad_p, u_t);
}

}  // namespace cbf
