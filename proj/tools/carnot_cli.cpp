// carnot: batch front end over the library. See README.md for the CSV layouts.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "carnot/census.hpp"
#include "carnot/coarea.hpp"
#include "carnot/endpoint.hpp"
#include "carnot/io.hpp"
#include "carnot/parallel.hpp"
#include "carnot/quadric.hpp"
#include "carnot/structure.hpp"

using namespace carnot;

namespace {

struct RunConfig {
    double tol_integer = 1e-9;
    double tol_endpoint = 1e-7;
    int grid = 1024;
    unsigned long long seed = 0;
    std::string output_path;

    void check() const {
        if (!(tol_integer > 0) || !(tol_endpoint > 0)) throw Error(ErrorKind::Precondition, "tolerances must be positive");
        if (grid < 256) throw Error(ErrorKind::Precondition, "--grid must be at least 256");
    }
};

struct Args {
    std::string file;
    std::string p, omega, u0, x;
    double s = 0, smax = 0;
    int samples = 720;
    int starts = 16;
    RunConfig cfg;
};

CarnotStructure load_structure(const std::string& path) {
    return validate_structure(parse_structure(read_file(path), path));
}

Vec need_list(const std::string& text, const std::string& flag, int n) {
    if (text.empty()) throw Error(ErrorKind::Precondition, flag + " is required");
    Vec v = parse_real_list(text, flag);
    if (v.size() != n)
        throw Error(ErrorKind::DimensionMismatch, flag + " needs " + std::to_string(n) + " values");
    return v;
}

std::string reduced_str(const BettiTable& T) {
    std::string out;
    for (auto& [j, b] : T.reduced) {
        if (!out.empty()) out += ";";
        out += std::to_string(j) + ":" + std::to_string(b);
    }
    return out;
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Precondition, "cannot write " + cfg.output_path);
    out << text;
}

std::string cmd_validate(const Args& a) {
    const CarnotStructure W = load_structure(a.file);
    std::ostringstream os;
    os << "key,value\n";
    os << "schema," << kStructureSchema << "\n";
    os << "d," << W.d << "\n";
    os << "l," << W.l << "\n";
    if (!a.p.empty()) {
        const Vec p = need_list(a.p, "--p", W.l);
        auto R = genericity_scan(W, p, a.samples, a.cfg.tol_integer);
        os << "min_gap," << fmt_real(R.min_gap) << "\n";
        os << "min_alpha," << fmt_real(R.min_alpha) << "\n";
        os << "integer_collisions," << R.integer_collisions.size() << "\n";
        for (const Vec& c : R.integer_collisions) os << "collision," << join_reals(c) << "\n";
        os << "generic," << (R.pass ? 1 : 0) << "\n";
    }
    return os.str();
}

std::string cmd_spectrum(const Args& a) {
    const CarnotStructure W = load_structure(a.file);
    const Vec w = need_list(a.omega, "--omega", W.l);
    auto S = skew_spectrum(omega_matrix(W, w));
    std::ostringstream os;
    os << "i,alpha\n";
    for (size_t i = 0; i < S.alphas.size(); ++i) os << i + 1 << "," << fmt_real(S.alphas[i]) << "\n";
    os << "# kernel_dim=" << S.kernel_dim << "\n";
    return os.str();
}

std::string cmd_census(const Args& a) {
    const CarnotStructure W = load_structure(a.file);
    const Vec p = need_list(a.p, "--p", W.l);
    CensusOptions opt;
    opt.grid = a.cfg.grid;
    opt.int_tol = a.cfg.tol_integer;
    const CensusReport R = enumerate(W, p, a.s, opt);
    std::ostringstream os;
    os << "energy,nu,index,omega,resonances,boundary\n";
    for (const auto& m : R.manifolds) {
        std::string res;
        for (const auto& r : m.resonances) {
            if (!res.empty()) res += ";";
            res += std::to_string(r.plane + 1) + ":" + std::to_string(r.n);
        }
        os << fmt_real(m.energy) << "," << m.nu << "," << m.index << "," << join_reals(m.omega) << "," << res << ","
           << (m.boundary ? 1 : 0) << "\n";
    }
    os << "# count=" << R.manifolds.size() << "\n";
    os << "# morse_bott=" << morse_bott_polynomial(R).str() << "\n";
    os << "# cone_constant=" << fmt_real(R.cone_constant) << "\n";
    os << "# grid_too_coarse=" << (R.grid_too_coarse ? 1 : 0) << "\n";
    return os.str();
}

std::string cmd_betti(const Args& a) {
    const CarnotStructure W = load_structure(a.file);
    const Vec p = need_list(a.p, "--p", W.l);
    if (!(a.s > 0)) throw Error(ErrorKind::Precondition, "--s must be positive");
    std::vector<double> ss = {a.s};
    if (a.smax > a.s)
        for (double s = 2 * a.s; s <= a.smax * (1 + 1e-12); s *= 2) ss.push_back(s);
    AnalyticOptions opt;
    opt.grid = a.cfg.grid;
    std::ostringstream os;
    os << "s,total,total_via_maxima,top_degree,critical_level,reduced\n";
    for (double s : ss) {
        auto P = index_profile_analytic(W, p, s, opt);
        auto T = betti_from_profile(P);
        os << fmt_real(s) << "," << T.total << "," << (T.empty_set ? 0 : total_betti_via_maxima(P)) << ","
           << T.top_degree() << "," << (P.degenerate ? 1 : 0) << "," << reduced_str(T) << "\n";
    }
    return os.str();
}

std::string cmd_tau(const Args& a) {
    const CarnotStructure W = load_structure(a.file);
    const Vec p = need_list(a.p, "--p", W.l);
    std::ostringstream os;
    os << "quantity,value\n";
    os << "tau_numeric," << fmt_real(tau_numeric(W, p, a.cfg.grid)) << "\n";
    try {
        os << "tau_commuting," << fmt_real(tau_commuting(W, p)) << "\n";
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotCommuting) throw;
    }
    if (!a.cfg.output_path.empty()) {
        std::ofstream out(a.cfg.output_path, std::ios::binary);
        if (!out) throw Error(ErrorKind::Precondition, "cannot write " + a.cfg.output_path);
        LambdaCurves(W, p).write_csv(out, a.samples);
    }
    return os.str();
}

std::string cmd_shoot(const Args& a) {
    const CarnotStructure W = load_structure(a.file);
    ExponentialControl e{need_list(a.omega, "--omega", W.l), need_list(a.u0, "--u0", W.d)};
    ShootOptions so;
    so.check_tol = a.cfg.tol_endpoint;
    const EndPoint E = shoot(W, e, so);
    // independent route: Fourier projection and the per-mode closed form
    const Projection pr = project_exponential(W, e, 256);
    const EndPoint F = endpoint_quadratic(W, pr.control);
    std::ostringstream os;
    os << "component,shoot,fourier\n";
    for (int i = 0; i < W.d; ++i)
        os << "x_" << i + 1 << "," << fmt_real(E.horizontal(i)) << "," << fmt_real(F.horizontal(i)) << "\n";
    for (int k = 0; k < W.l; ++k)
        os << "y_" << k + 1 << "," << fmt_real(E.vertical(k)) << "," << fmt_real(F.vertical(k)) << "\n";
    os << "# energy=" << fmt_real(std::numbers::pi * e.u0.squaredNorm()) << "\n";
    os << "# fourier_tail=" << fmt_real(pr.tail_mass) << "\n";
    return os.str();
}

std::string cmd_solve(const Args& a) {
    const CarnotStructure W = load_structure(a.file);
    EndPoint target{a.x.empty() ? Vec(Vec::Zero(W.d)) : need_list(a.x, "--x", W.d), need_list(a.p, "--p", W.l)};
    if (a.starts < 1) throw Error(ErrorKind::Precondition, "--starts must be positive");
    std::mt19937_64 rng(a.cfg.seed);
    std::normal_distribution<double> N(0.0, 1.0);
    std::vector<ExponentialControl> inits;
    for (int k = 0; k < a.starts; ++k) {
        ExponentialControl e{Vec(W.l), Vec(W.d)};
        for (int i = 0; i < W.l; ++i) e.omega(i) = N(rng);
        for (int i = 0; i < W.d; ++i) e.u0(i) = N(rng);
        inits.push_back(e);
    }
    auto sols = solve_endpoint_multistart(W, target, inits, a.cfg.tol_endpoint);
    if (sols.empty()) throw Error(ErrorKind::NoConvergence, "no start reached the target");
    std::ostringstream os;
    os << "energy,omega,u0\n";
    for (const auto& e : sols)
        os << fmt_real(std::numbers::pi * e.u0.squaredNorm()) << "," << join_reals(e.omega) << "," << join_reals(e.u0)
           << "\n";
    return os.str();
}

std::string cmd_quadric(const Args& a) {
    auto [q1, q2] = parse_forms(read_file(a.file), a.file);
    auto P = index_profile_finite(q1, q2, a.cfg.grid);
    auto T = betti_from_profile(P);
    std::ostringstream os;
    os << "start,end,index\n";
    const size_t B = P.breakpoints.size();
    if (B == 0) os << "0," << fmt_real(2 * std::numbers::pi) << "," << P.values[0] << "\n";
    for (size_t k = 0; k < B; ++k) {
        double e = P.breakpoints[(k + 1) % B];
        if (k + 1 == B) e += 2 * std::numbers::pi;
        os << fmt_real(P.breakpoints[k]) << "," << fmt_real(e) << "," << P.values[k] << "\n";
    }
    os << "# betti_total=" << T.total << "\n";
    os << "# reduced=" << reduced_str(T) << "\n";
    os << "# degenerate=" << (P.degenerate ? 1 : 0) << "\n";
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    apply_thread_env();
    CLI::App app{"step-two Carnot groups: geodesic census, Betti numbers, coarea constant"};
    app.require_subcommand(1);
    Args a;

    auto common = [&](CLI::App* sc, bool with_file = true) {
        if (with_file) sc->add_option("file", a.file, "input document")->required();
        sc->add_option("--tol-integer", a.cfg.tol_integer, "resonance tolerance")->capture_default_str();
        sc->add_option("--tol-endpoint", a.cfg.tol_endpoint, "endpoint tolerance")->capture_default_str();
        sc->add_option("--grid", a.cfg.grid, "angular grid")->capture_default_str();
        sc->add_option("--seed", a.cfg.seed, "random seed")->capture_default_str();
        sc->add_option("--out", a.cfg.output_path, "output path");
    };

    std::map<std::string, std::string (*)(const Args&)> run;
    auto* v = app.add_subcommand("validate", "check a structure, optionally scan genericity for --p");
    common(v);
    v->add_option("--p", a.p);
    v->add_option("--samples", a.samples)->capture_default_str();
    run["validate"] = cmd_validate;

    auto* sp = app.add_subcommand("spectrum", "alphas of omega A");
    common(sp);
    sp->add_option("--omega", a.omega)->required();
    run["spectrum"] = cmd_spectrum;

    auto* ce = app.add_subcommand("census", "critical manifolds with energy <= s");
    common(ce);
    ce->add_option("--p", a.p)->required();
    ce->add_option("--s", a.s)->required();
    run["census"] = cmd_census;

    auto* be = app.add_subcommand("betti", "Betti numbers of the energy sublevel");
    common(be);
    be->add_option("--p", a.p)->required();
    be->add_option("--s", a.s)->required();
    be->add_option("--smax", a.smax, "double s up to this value");
    run["betti"] = cmd_betti;

    auto* ta = app.add_subcommand("tau", "coarea constant; --out receives the integrand CSV");
    common(ta);
    ta->add_option("--p", a.p)->required();
    ta->add_option("--samples", a.samples, "rows in the --out dump")->capture_default_str();
    run["tau"] = cmd_tau;

    auto* sh = app.add_subcommand("shoot", "endpoint of exp(-t omega A) u0");
    common(sh);
    sh->add_option("--omega", a.omega)->required();
    sh->add_option("--u0", a.u0)->required();
    run["shoot"] = cmd_shoot;

    auto* so = app.add_subcommand("solve", "geodesics to (x, p) by multistart shooting");
    common(so);
    so->add_option("--p", a.p)->required();
    so->add_option("--x", a.x, "horizontal target, default 0");
    so->add_option("--starts", a.starts)->capture_default_str();
    run["solve"] = cmd_solve;

    auto* qu = app.add_subcommand("quadric", "index profile and Betti numbers of a pencil of two forms");
    common(qu);
    run["quadric"] = cmd_quadric;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    try {
        a.cfg.check();
        std::string text = run.at(name)(a);
        if (name == "tau") std::cout << text;  // --out already holds the dump
        else emit(a.cfg, text);
    } catch (const Error& e) {
        std::cerr << "carnot " << name << ": " << e.what() << "\n";
        return is_numerical(e.kind()) ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "carnot " << name << ": " << e.what() << "\n";
        return 3;
    }
    return 0;
}
