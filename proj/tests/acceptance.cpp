// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "carnot/census.hpp"
#include "carnot/coarea.hpp"
#include "carnot/endpoint.hpp"
#include "carnot/quadric.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace carnot;
using namespace testsupport;

namespace {

const double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& why) {
        if (!ok && pass) detail = why;
        pass = pass && ok;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string f(const char* fmt, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
    return buf;
}

int neg_count(const Mat& F, double tol = 1e-9) {
    Eigen::SelfAdjointEigenSolver<Mat> es(F, Eigen::EigenvaluesOnly);
    int c = 0;
    for (int k = 0; k < es.eigenvalues().size(); ++k) c += es.eigenvalues()(k) < -tol;
    return c;
}

double fit_exponent(const std::vector<double>& x, const std::vector<double>& y, size_t first) {
    double mx = 0, my = 0;
    const double n = static_cast<double>(x.size() - first);
    for (size_t k = first; k < x.size(); ++k) mx += std::log(x[k]), my += std::log(y[k]);
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (size_t k = first; k < x.size(); ++k) {
        sxy += (std::log(x[k]) - mx) * (std::log(y[k]) - my);
        sxx += (std::log(x[k]) - mx) * (std::log(x[k]) - mx);
    }
    return sxy / sxx;
}

// 1. Heisenberg: total Betti 2, top degree 2 floor(s/z) - 1 matching the truncated pencil.
Outcome heisenberg_betti() {
    Outcome o;
    auto W = heisenberg();
    double worst_time = 0;
    int checked = 0;
    std::vector<double> ss, tops;
    for (double z : {1.0, 0.7, 2.5}) {
        const double e1 = enumerate_l1(W, z, 2 * z).manifolds.front().energy;
        for (double r : {1.3, 2.6, 4.1, 7.7, 12.2, 25.5, 51.9}) {
            const double s = r * e1;
            auto t0 = std::chrono::steady_clock::now();
            auto P = index_profile_analytic(W, vec({z}), s);
            auto T = betti_from_profile(P);
            worst_time = std::max(worst_time, seconds_since(t0));
            const int k = static_cast<int>(std::floor(s / z));
            o.require(T.total == 2, f("total %g at s = %g", T.total, s));
            o.require(T.top_degree() == 2 * k - 1, f("top degree %g, want %g", T.top_degree(), 2 * k - 1));
            // pencil -q + z |.|^2 / (2 s) on T^1..T^L, admissible covector -1
            const int L = k + 3;
            Mat F = -vertical_gram(W, 0, L) + z / (2 * s) * Mat::Identity(4 * L, 4 * L);
            o.require(neg_count(F) == T.top_degree() + 1, f("pencil index %g vs top + 1 = %g", neg_count(F), T.top_degree() + 1));
            if (z == 1.0) {
                ss.push_back(s);
                tops.push_back(T.top_degree() + 1);
            }
            ++checked;
        }
    }
    // linear growth: least-squares slope of the top degree against s is 2 / z
    double mx = 0, my = 0;
    for (size_t k = 0; k < ss.size(); ++k) mx += ss[k], my += tops[k];
    mx /= ss.size();
    my /= ss.size();
    double sxy = 0, sxx = 0;
    for (size_t k = 0; k < ss.size(); ++k) sxy += (ss[k] - mx) * (tops[k] - my), sxx += (ss[k] - mx) * (ss[k] - mx);
    const double slope = sxy / sxx;
    o.require(std::abs(slope - 2) < 0.05, f("top degree grows like %g s", slope));
    o.require(worst_time < 1.0, f("slowest level %g s", worst_time));
    o.detail = o.pass ? f("%g levels, total 2, top degree 2 floor(s/z) - 1 = pencil index - 1, top degree ~ %.4f s at z = 1, slowest %.3g s",
                          checked, slope, worst_time)
                      : o.detail;
    return o;
}

// 2. Heisenberg census: floor(s/E1) circles, index 2(n-1) from the truncated Hessian, J = omega(p).
Outcome heisenberg_census() {
    Outcome o;
    auto W = heisenberg();
    int manifolds = 0;
    for (double z : {kPi, 1.0, -0.45}) {
        for (double s : {10.3, 31.7}) {
            auto R = enumerate_l1(W, z, s);
            if (R.manifolds.empty()) {
                o.require(false, "empty census");
                continue;
            }
            const double e1 = R.manifolds.front().energy;
            o.require(static_cast<int>(R.manifolds.size()) == static_cast<int>(std::floor(s / e1)),
                      f("count %g vs floor(s/E1) = %g", R.manifolds.size(), std::floor(s / e1)));
            for (size_t k = 0; k < R.manifolds.size(); ++k) {
                const auto& m = R.manifolds[k];
                const int n = static_cast<int>(k) + 1;
                o.require(m.nu == 1, "nu != 1");
                o.require(m.index == 2 * (n - 1), f("index %g at n = %g", m.index, n));
                const int L = 2 * n;
                Mat H = Mat::Identity(2 * W.d * L, 2 * W.d * L) - omega_q_operator(W, m.omega, L);
                o.require(neg_count(H) == m.index, f("Hessian negatives %g vs index %g", neg_count(H), m.index));
                const double J = kPi * m.sample_control.u0.squaredNorm();
                o.require(std::abs(J - m.omega.dot(vec({z}))) <= 1e-9 * std::max(1.0, J), f("J = %.15g vs omega(p) = %.15g", J, m.omega(0) * z));
                const EndPoint E = shoot(W, m.sample_control);
                o.require(std::abs(E.vertical(0) - z) <= 1e-7 * std::max(1.0, std::abs(z)) && E.horizontal.norm() <= 1e-7,
                          "sample geodesic misses the target");
                ++manifolds;
            }
        }
    }
    if (o.pass) o.detail = f("%g circles: counts floor(s/E1), indices 2(n-1) equal Hessian negatives, J = omega(p) to 1e-9", manifolds);
    return o;
}

// 3. Endpoint closed form vs RK4.
Outcome endpoint_oracle() {
    Outcome o;
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> D(2, 6), Lw(1, 8);
    auto t0 = std::chrono::steady_clock::now();
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int d = D(rng);
        const int lmax = std::min(3, d * (d - 1) / 2);
        const int l = 1 + trial % lmax;
        auto W = random_structure(rng, d, l);
        auto u = random_control(rng, d, Lw(rng));
        worst = std::max(worst, rel_err(endpoint_quadratic(W, u), endpoint_ode(W, u, 4096)));
    }
    const double secs = seconds_since(t0);
    o.require(worst <= 1e-6, f("worst relative error %g", worst));
    o.require(secs < 30, f("took %g s", secs));
    if (o.pass) o.detail = f("100 structures, worst relative error %.3g, %.3g s", worst, secs);
    return o;
}

// 4. Spectrum of the gradient operator of omega.q against {+-alpha_i/k, twice each}.
Outcome operator_spectrum() {
    Outcome o;
    std::mt19937_64 rng(4);
    std::normal_distribution<double> N(0.0, 1.0);
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
        auto W = random_structure(rng, 4, 1 + trial % 3);
        Vec w(W.l);
        for (int k = 0; k < W.l; ++k) w(k) = N(rng);
        const int L = 8;
        Eigen::SelfAdjointEigenSolver<Mat> es(omega_q_operator(W, w, L), Eigen::EigenvaluesOnly);
        std::vector<double> want;
        for (double a : skew_alphas(omega_matrix(W, w)))
            for (int k = 1; k <= L; ++k)
                for (int rep = 0; rep < 2; ++rep) {
                    want.push_back(a / k);
                    want.push_back(-a / k);
                }
        std::sort(want.begin(), want.end());
        if (static_cast<int>(want.size()) != es.eigenvalues().size()) {
            o.require(false, "size mismatch");
            continue;
        }
        for (size_t k = 0; k < want.size(); ++k) worst = std::max(worst, std::abs(want[k] - es.eigenvalues()(k)));
    }
    o.require(worst <= 1e-8, f("worst eigenvalue gap %g", worst));
    if (o.pass) o.detail = f("20 covectors, d = 4, L = 8, worst gap %.3g", worst);
    return o;
}

// 5. Single quadric table and relative Betti numbers vs simplicial homology.
Outcome finite_case() {
    Outcome o;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.5, 2.0);
    int quadrics = 0;
    for (int N = 3; N <= 12; ++N)
        for (int k = 0; k <= N; ++k) {
            Mat Dg = Mat::Zero(N, N);
            for (int i = 0; i < N; ++i) Dg(i, i) = (i < k ? -1 : 1) * U(rng);
            Mat Q = random_orthogonal(rng, N);
            auto [A, B] = single_quadric_pencil(Q * Dg * Q.transpose());
            auto T = betti_from_profile(index_profile_finite(A, B));
            if (k == 0 || k == N) o.require(T.empty_set, f("N = %g, k = %g should be empty", N, k));
            else
                o.require(T.reduced == oracles::product_of_spheres(k - 1, N - 1 - k) && T.total == 4,
                          f("N = %g, k = %g differs from S^(k-1) x S^(N-k-1)", N, k));
            ++quadrics;
        }
    const int M = 48;
    int arcs = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        auto c = oracles::random_arc_case(rng, M);
        if (!c) continue;
        auto want = oracles::simplicial(M, oracles::make_cx(M, c->A, c->fullA), oracles::make_cx(M, c->B, c->fullB));
        auto got = relative_betti(oracles::to_arcs(M, c->A, c->fullA), oracles::to_arcs(M, c->B, c->fullB));
        o.require(got.b0 == want.b0 && got.b1 == want.b1, f("arc case %g differs", trial));
        ++arcs;
    }
    if (o.pass) o.detail = f("%g quadrics N = 3..12, %g arc configurations", quadrics, arcs);
    return o;
}

// 6. tau closed form vs numeric.
Outcome coarea_closed_form() {
    Outcome o;
    auto W = commuting_example();
    const double tc = tau_commuting(W, vec({0, 1})), tn = tau_numeric(W, vec({0, 1}));
    o.require(std::abs(tc - 6) <= 1e-12, f("closed form %.15g", tc));
    o.require(std::abs(tn - tc) <= 1e-4 * tc, f("numeric %.15g", tn));
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> A(0.0, 2 * kPi);
    int done = 0;
    double worst = 0;
    while (done < 50) {
        auto V = random_commuting(rng, 4 + 2 * (done % 3));
        Vec p = circle_point(A(rng));
        double a, b;
        try {
            a = tau_numeric(V, p);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NonGenericTarget) continue;
            throw;
        }
        b = tau_commuting(V, p);
        worst = std::max(worst, std::abs(a - b) / std::max(b, 1e-300));
        ++done;
    }
    o.require(worst <= 1e-4, f("worst relative gap %g", worst));
    if (o.pass) o.detail = f("worked instance %.12g (closed form %.12g), 50 random pairs d <= 8, worst gap %.3g", tn, tc, worst);
    return o;
}

// 7. Betti slope vs tau on the worked instance up to 200 base energies.
Outcome coarea_slope() {
    Outcome o;
    auto W = commuting_example();
    Vec p = vec({0, 1});
    auto t0 = std::chrono::steady_clock::now();
    const double e1 = base_energy(W, p);
    // 200 E1 is itself a critical energy here; the sweep sits just above it
    const double smax = 200 * e1 * (1 + 1e-3);
    std::vector<double> s;
    for (int k = 0; k < 8; ++k) s.push_back(smax * std::pow(2.0, k - 7));
    auto R = slope_check(W, p, s);
    const double secs = seconds_since(t0);
    o.require(R.rel_err <= 0.1, f("slope %.6g vs tau %.6g, relative error %.4g", R.slope, R.tau, R.rel_err));
    o.require(secs < 120, f("took %g s", secs));
    o.detail = f("slope %.6g, tau %.6g, relative error %.4g, %.3g s", R.slope, R.tau, R.rel_err, secs) +
               (o.pass ? "" : " (needs <= 0.1)");
    return o;
}

// 8. b(sublevel) <= sum of torus Betti numbers; linear vs quadratic growth.
Outcome morse_bott() {
    Outcome o;
    int instances = 0;
    auto Wh = heisenberg();
    for (double s = 1.7; s < 60; s *= 1.5) {
        const int b = betti_from_profile(index_profile_analytic(Wh, vec({1.0}), s)).total;
        o.require(b <= morse_bott_polynomial(enumerate_l1(Wh, 1.0, s)).at_one(), f("Heisenberg s = %g", s));
        ++instances;
    }
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> A(0.0, 2 * kPi);
    CensusOptions opt;
    opt.check_refinement = false;
    int structures = 0, strict = 0;
    while (structures < 20) {
        auto W = random_structure(rng, 4, 2);
        Vec p = circle_point(A(rng));
        double e1;
        std::vector<std::pair<int, long long>> rows;
        try {
            e1 = base_energy(W, p, opt);
            for (int k = 0; k < 10; ++k) {
                const double s = e1 * 1.5 * std::pow(1.4, k) * 1.000731;
                auto P = index_profile_analytic(W, p, s);
                const int b = betti_from_profile(P).total;
                rows.push_back({b, morse_bott_polynomial(enumerate_l2(W, p, s, opt)).at_one()});
            }
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NonGenericTarget) continue;
            throw;
        }
        for (auto [b, mb] : rows) {
            o.require(b <= mb, f("random structure %g: b = %g > %g", structures, b, static_cast<double>(mb)));
            ++instances;
        }
        strict += rows.back().first < rows.back().second;
        ++structures;
    }
    o.require(strict == 20, f("strict at the top level on %g of 20", strict));
    // growth exponents on the worked commuting instance
    auto W = commuting_example();
    Vec p = vec({0, 1});
    std::vector<double> ss, bs, ms;
    for (double s = 2.0 * 1.000731; s < 70; s *= 1.5) {
        ss.push_back(s);
        bs.push_back(betti_from_profile(index_profile_analytic(W, p, s)).total);
        ms.push_back(static_cast<double>(morse_bott_polynomial(enumerate_l2(W, p, s, opt)).at_one()));
        o.require(bs.back() <= ms.back(), f("commuting s = %g", s));
        ++instances;
    }
    const double eb = fit_exponent(ss, bs, ss.size() / 2), em = fit_exponent(ss, ms, ss.size() / 2);
    o.require(std::abs(eb - 1.0) <= 0.2, f("Betti exponent %g", eb));
    o.require(std::abs(em - 2.0) <= 0.3, f("Morse-Bott exponent %g", em));
    if (o.pass)
        o.detail = f("%g instances, strict on all 20 random structures at large s, exponents %.3f (Betti) and %.3f (sum over tori)",
                     instances, eb, em);
    return o;
}

bool same_census(const CensusReport& a, const CensusReport& b, double eps2) {
    if (a.manifolds.size() != b.manifolds.size()) return false;
    std::vector<bool> used(b.manifolds.size(), false);
    for (const auto& m : a.manifolds) {
        bool hit = false;
        for (size_t k = 0; k < b.manifolds.size() && !hit; ++k) {
            const auto& n = b.manifolds[k];
            if (used[k] || (m.omega - n.omega).norm() > 1e-9 * std::max(1.0, m.omega.norm())) continue;
            if (m.nu != n.nu || m.index != n.index) continue;
            if (std::abs(m.energy - eps2 * n.energy) > 1e-9 * std::max(1.0, m.energy)) continue;
            used[k] = hit = true;
        }
        if (!hit) return false;
    }
    return true;
}

// 9. (eps^2 p, c) vs (p, c / eps^2).
Outcome scaling() {
    Outcome o;
    std::mt19937_64 rng(9);
    std::vector<std::pair<CarnotStructure, Vec>> cases = {
        {heisenberg(), vec({1.3})}, {commuting_example(), vec({0, 1})}, {random_structure(rng, 4, 2), vec({0.6, -0.8})}};
    int compared = 0;
    for (auto& [W, p] : cases) {
        const double e1 = base_energy(W, p);
        for (double eps : {0.5, 0.1}) {
            const double e2 = eps * eps;
            const double c = (W.l == 1 ? 9.1 : 7.3) * e2 * e1 * 1.000731;  // (p, c / eps^2) stays at a few E1
            auto A = enumerate(W, e2 * p, c);
            auto B = enumerate(W, p, c / e2);
            o.require(!A.manifolds.empty(), "empty census");
            o.require(same_census(A, B, e2), f("census differs at eps = %g", eps));
            auto TA = betti_from_profile(index_profile_analytic(W, e2 * p, c));
            auto TB = betti_from_profile(index_profile_analytic(W, p, c / e2));
            o.require(TA.reduced == TB.reduced && TA.total == TB.total, f("Betti tables differ at eps = %g", eps));
            compared += static_cast<int>(A.manifolds.size());
        }
    }
    if (o.pass) o.detail = f("%g manifolds matched with equal multipliers to 1e-9, Betti tables identical", compared);
    return o;
}

}  // namespace

int main() {
    struct Item {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    std::vector<Item> items = {
        {1, "Heisenberg total Betti", heisenberg_betti},
        {2, "Heisenberg census", heisenberg_census},
        {3, "endpoint oracle equivalence", endpoint_oracle},
        {4, "spectrum of the gradient operator", operator_spectrum},
        {5, "finite quadric intersections", finite_case},
        {6, "coarea closed form", coarea_closed_form},
        {7, "coarea asymptotic slope", coarea_slope},
        {8, "Morse-Bott inequality", morse_bott},
        {9, "scaling law", scaling},
    };
    int failed = 0;
    for (const auto& it : items) {
        Outcome o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            o = it.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("threw: ") + e.what();
        }
        std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", it.id, it.name, o.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(items.size()) - failed, items.size());
    return failed ? 1 : 0;
}
