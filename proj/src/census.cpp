#include "carnot/census.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace carnot {

namespace {

const double kPi = std::numbers::pi;

struct Candidate {
    Vec omega;
    std::vector<Resonance> res;
    bool boundary = false;
    std::vector<Vec> seeds;  // frame hints per resonance, needed when planes tie
};

struct Node {
    double theta = 0.0;
    double pdot = 0.0;
    std::vector<double> alpha;  // floor(d/2) entries, descending, zeros padded
    std::vector<Vec> grad;
    std::vector<Vec> X;
};

std::vector<double> padded(const std::vector<double>& a, int m) {
    std::vector<double> out(a.begin(), a.end());
    out.resize(m, 0.0);
    return out;
}

Node eval_node(const CarnotStructure& W, const Vec& p, double theta) {
    Node nd;
    nd.theta = theta;
    Vec w = circle_point(theta);
    nd.pdot = w.dot(p);
    auto S = skew_spectrum(omega_matrix(W, w));
    const int m = W.d / 2;
    nd.alpha = padded(S.alphas, m);
    for (int i = 0; i < m; ++i) {
        bool live = i < static_cast<int>(S.alphas.size());
        nd.grad.push_back(live ? plane_gradient(W, S, i) : Vec::Zero(2));
        nd.X.push_back(live ? S.X[i] : Vec::Zero(W.d));
    }
    return nd;
}

double det2(const Vec& a, const Vec& b) { return a(0) * b(1) - a(1) * b(0); }

// p = c0 g0 + c1 g1 with c >= 0 (up to a relative slack)
bool in_cone(const Vec& g0, const Vec& g1, const Vec& p, double slack = 1e-9) {
    double D = det2(g0, g1);
    double scale = g0.norm() * g1.norm();
    if (!(std::abs(D) > 1e-14 * scale)) return false;
    double c0 = det2(p, g1) / D, c1 = det2(g0, p) / D;
    double tol = slack * p.norm() / std::sqrt(scale);
    return c0 >= -tol && c1 >= -tol;
}

template <class F>
double bisect(F&& f, double a, double b, double fa, double ftol) {
    for (int it = 0; it < 200; ++it) {
        double c = 0.5 * (a + b);
        if (c <= a || c >= b) break;
        double fc = f(c);
        if (std::abs(fc) <= ftol) return c;
        if ((fa < 0) == (fc < 0)) {
            a = c;
            fa = fc;
        } else {
            b = c;
        }
    }
    return 0.5 * (a + b);
}

bool close_covectors(const Vec& a, const Vec& b) {
    return (a - b).norm() <= kMergeTol * std::max(1.0, std::max(a.norm(), b.norm()));
}

// Clusters candidates whose covectors agree to kMergeTol; resonance lists are
// united. A cluster that mixes single and double sources is a boundary case.
std::vector<Candidate> merge(std::vector<Candidate> c) {
    std::sort(c.begin(), c.end(), [](const Candidate& a, const Candidate& b) {
        for (int k = 0; k < a.omega.size(); ++k)
            if (a.omega(k) != b.omega(k)) return a.omega(k) < b.omega(k);
        return false;
    });
    std::vector<char> used(c.size(), 0);
    std::vector<Candidate> out;
    for (size_t i = 0; i < c.size(); ++i) {
        if (used[i]) continue;
        Candidate acc = c[i];
        size_t sources = acc.res.size();
        bool mixed = false;
        for (size_t j = i + 1; j < c.size(); ++j) {
            if (c[j].omega(0) - c[i].omega(0) > kMergeTol * std::max(1.0, c[i].omega.norm())) break;
            if (used[j] || !close_covectors(c[i].omega, c[j].omega)) continue;
            used[j] = 1;
            if (c[j].res.size() != sources) mixed = true;
            acc.boundary = acc.boundary || c[j].boundary;
            if (acc.seeds.empty() && c[j].res == acc.res) acc.seeds = c[j].seeds;
            for (const Resonance& r : c[j].res)
                if (std::find_if(acc.res.begin(), acc.res.end(),
                                 [&](const Resonance& x) { return x.plane == r.plane; }) == acc.res.end())
                    acc.res.push_back(r);
        }
        acc.boundary = acc.boundary || mixed;
        std::sort(acc.res.begin(), acc.res.end(),
                  [](const Resonance& a, const Resonance& b) { return a.plane < b.plane; });
        out.push_back(std::move(acc));
    }
    return out;
}

// Orthonormal pair (X, Y) with M X = -n Y spanning a plane inside the
// n-eigenspace of M, seeded by a nearby frame vector.
std::pair<Vec, Vec> resonant_plane(const Mat& M, double n, const Vec& seed, const std::vector<Vec>& avoid) {
    Eigen::SelfAdjointEigenSolver<Mat> es(-M * M);
    Vec x = Vec::Zero(M.rows());
    for (int k = 0; k < M.rows(); ++k)
        if (std::abs(es.eigenvalues()(k) - n * n) <= 1e-6 * n * n) {
            Vec e = es.eigenvectors().col(k);
            x += e.dot(seed) * e;
        }
    for (const Vec& a : avoid) x -= a.dot(x) * a;
    x.normalize();
    Vec y = -M * x / n;
    y.normalize();
    return {x, y};
}

void finish_report(CensusReport& R, const CarnotStructure& W, const Vec& p, double s,
                   const std::vector<Candidate>& cands, Exec exec) {
    std::vector<CriticalManifold> ms(cands.size());
    std::vector<char> keep(cands.size(), 0);
    const int n_c = static_cast<int>(cands.size());
#pragma omp parallel for schedule(dynamic, 16) if (exec == Exec::Parallel)
    for (int ci = 0; ci < n_c; ++ci) {
        const Candidate& cd = cands[ci];
        CriticalManifold m;
        m.omega = cd.omega;
        m.resonances = cd.res;
        m.nu = static_cast<int>(cd.res.size());
        m.energy = cd.omega.dot(p);
        m.boundary = cd.boundary;
        if (!(m.energy > 0) || m.energy > s * (1 + 1e-12)) continue;
        const Mat M = omega_matrix(W, cd.omega);
        const SkewSpectrum S = skew_spectrum(M);
        m.index = manifold_index(W, cd.omega);
        // frames of the resonant planes; tied planes share an eigenspace
        std::vector<Vec> Xs, Ys, grads;
        for (size_t ri = 0; ri < cd.res.size(); ++ri) {
            const Resonance& r = cd.res[ri];
            Vec X = cd.seeds.size() == cd.res.size() ? cd.seeds[ri] : S.X[r.plane];
            std::vector<Vec> avoid;
            for (size_t k = 0; k < Xs.size(); ++k) {
                avoid.push_back(Xs[k]);
                avoid.push_back(Ys[k]);
            }
            auto [x, y] = resonant_plane(M, r.n, X, avoid);
            if (!std::isfinite(x.norm()) || x.norm() < 0.5) {
                // the seed frame collapsed onto an earlier plane: use any free direction
                for (int e = 0; e < W.d && !(x.norm() > 0.5); ++e) {
                    Vec seed = Vec::Unit(W.d, e);
                    std::tie(x, y) = resonant_plane(M, r.n, seed, avoid);
                }
            }
            Xs.push_back(x);
            Ys.push_back(y);
            Vec g(W.l);
            for (int k = 0; k < W.l; ++k) g(k) = x.dot(W.matrices[k] * y);
            grads.push_back(kPi / r.n * g);  // q of the unit exponential control on this plane
        }
        // p = sum_j c_j l_j with c_j >= 0; least squares keeps l = 1 and l = 2 uniform
        Mat Lm(W.l, grads.size());
        for (size_t j = 0; j < grads.size(); ++j) Lm.col(j) = grads[j];
        Vec c;
        if (grads.size() == 1) {
            c = Vec::Constant(1, Lm.col(0).dot(p) / Lm.col(0).squaredNorm());
        } else if (static_cast<int>(grads.size()) == W.l) {
            c = Lm.colPivHouseholderQr().solve(p);
        } else {
            // nu > l: put everything on the first plane
            c = Vec::Zero(grads.size());
            c(0) = Lm.col(0).dot(p) / Lm.col(0).squaredNorm();
        }
        Vec u0 = Vec::Zero(W.d);
        bool ok = true;
        for (int j = 0; j < c.size(); ++j) {
            if (c(j) < -1e-9 * std::max(1.0, c.cwiseAbs().maxCoeff())) ok = false;
            u0 += std::sqrt(std::max(0.0, c(j))) * Xs[j];
        }
        if (!ok) continue;
        m.sample_control = {cd.omega, u0};
        ms[ci] = std::move(m);
        keep[ci] = 1;
    }
    for (int c = 0; c < n_c; ++c)
        if (keep[c]) R.manifolds.push_back(std::move(ms[c]));
    std::sort(R.manifolds.begin(), R.manifolds.end(), [](const CriticalManifold& a, const CriticalManifold& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        for (int k = 0; k < a.omega.size(); ++k)
            if (a.omega(k) != b.omega(k)) return a.omega(k) < b.omega(k);
        return false;
    });
    R.s_max = s;
    R.cone_constant = 0.0;
    for (const auto& m : R.manifolds) {
        R.cone_constant = std::max(R.cone_constant, m.omega.norm() / m.energy);
        R.counts_by_nu[m.nu]++;
    }
}

std::vector<Candidate> scan_l2(const CarnotStructure& W, const Vec& p, double s, int grid, Exec exec, double tol) {
    const int m = W.d / 2;
    const double th0 = std::atan2(p(1), p(0)) - kPi / 2;
    std::vector<Node> nodes(grid);
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (int k = 0; k < grid; ++k) nodes[k] = eval_node(W, p, th0 + kPi * (k + 0.5) / grid);
    const int cells = grid - 1;

    auto alphas_at = [&](double th) { return padded(skew_alphas(omega_matrix(W, circle_point(th))), m); };

    // (a) double resonances, one task per (pair, cell)
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) pairs.push_back({i, j});
    const int tasks = static_cast<int>(pairs.size()) * cells;
    std::vector<std::vector<Candidate>> found(tasks);
#pragma omp parallel for schedule(dynamic, 4) if (exec == Exec::Parallel)
    for (int t = 0; t < tasks; ++t) {
        auto [i, j] = pairs[t / cells];
        const Node &A = nodes[t % cells], &B = nodes[t % cells + 1];
        bool flip = (det2(A.grad[i], p) < 0) != (det2(B.grad[i], p) < 0) ||
                    (det2(A.grad[j], p) < 0) != (det2(B.grad[j], p) < 0);
        if (!flip && !in_cone(A.grad[i], A.grad[j], p) && !in_cone(B.grad[i], B.grad[j], p)) continue;
        const double lam_i = std::max(A.alpha[i] / A.pdot, B.alpha[i] / B.pdot);
        const double lam_j = std::max(A.alpha[j] / A.pdot, B.alpha[j] / B.pdot);
        const long n_max = static_cast<long>(std::ceil(s * lam_i * 1.05)) + 1;
        const long m_max = static_cast<long>(std::ceil(s * lam_j * 1.05)) + 1;
        auto ratio = [](double a, double b) { return b > 0 ? a / b : std::numeric_limits<double>::infinity(); };
        const double r_lo = std::min(ratio(A.alpha[i], A.alpha[j]), ratio(B.alpha[i], B.alpha[j]));
        const double r_hi = std::max(ratio(A.alpha[i], A.alpha[j]), ratio(B.alpha[i], B.alpha[j]));
        for (long mm = 1; mm <= m_max; ++mm) {
            long n_lo = std::max<long>(1, static_cast<long>(std::floor(mm * r_lo)));
            long n_hi = std::isfinite(r_hi) ? std::min<long>(n_max, static_cast<long>(std::ceil(mm * r_hi))) : n_max;
            for (long nn = n_lo; nn <= n_hi; ++nn) {
                if (nn == mm) continue;
                auto f = [&](const std::vector<double>& a) { return mm * a[i] - nn * a[j]; };
                double fa = f(A.alpha), fb = f(B.alpha);
                if ((fa < 0) == (fb < 0) && fa != 0.0) continue;
                auto g = [&](double th) { return f(alphas_at(th)); };
                double th = fa == 0.0 ? A.theta : bisect(g, A.theta, B.theta, fa, 1e-13 * mm);
                Vec w = circle_point(th);
                auto al = alphas_at(th);
                if (!(al[i] > 0) || w.dot(p) <= 0) continue;
                Vec omega = (nn / al[i]) * w;
                if (omega.dot(p) > s * (1 + 1e-12)) continue;
                auto S = skew_spectrum(omega_matrix(W, omega));
                if (static_cast<int>(S.alphas.size()) <= j) continue;
                if (std::abs(S.alphas[i] - nn) > tol * std::max(1.0, double(nn)) ||
                    std::abs(S.alphas[j] - mm) > tol * std::max(1.0, double(mm)))
                    continue;
                if (!in_cone(plane_gradient(W, S, i), plane_gradient(W, S, j), p)) continue;
                found[t].push_back({omega, {{i, static_cast<int>(nn)}, {j, static_cast<int>(mm)}}, false, {}});
            }
        }
    }

    // ties alpha_i = alpha_{i+1}: refine gap minima, then every integer n works
    std::vector<std::vector<Candidate>> tie_found(m > 1 ? m - 1 : 0);
    for (int i = 0; i + 1 < m; ++i) {
        auto gap = [&](double th) {
            auto a = alphas_at(th);
            return a[i] - a[i + 1];
        };
        for (int k = 1; k + 1 < grid; ++k) {
            double g0 = nodes[k - 1].alpha[i] - nodes[k - 1].alpha[i + 1];
            double g1 = nodes[k].alpha[i] - nodes[k].alpha[i + 1];
            double g2 = nodes[k + 1].alpha[i] - nodes[k + 1].alpha[i + 1];
            if (!(g1 <= g0 && g1 <= g2)) continue;
            double a = nodes[k - 1].theta, b = nodes[k + 1].theta;
            const double gr = (std::sqrt(5.0) - 1) / 2;
            double c = b - gr * (b - a), e = a + gr * (b - a), fc = gap(c), fe = gap(e);
            for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
                if (fc < fe) {
                    b = e; e = c; fe = fc;
                    c = b - gr * (b - a); fc = gap(c);
                } else {
                    a = c; c = e; fc = fe;
                    e = a + gr * (b - a); fe = gap(e);
                }
            }
            double th = 0.5 * (a + b);
            auto al = alphas_at(th);
            if (!(al[i] > 1e-9) || al[i] - al[i + 1] > 1e-9 * al[i]) continue;
            Vec w = circle_point(th);
            double pd = w.dot(p);
            if (pd <= 0) continue;
            // the planes are smooth through the tie: take gradients just before it
            Node side = eval_node(W, p, th - 1e-6);
            if (!in_cone(side.grad[i], side.grad[i + 1], p, 1e-5)) continue;
            double mean_alpha = 0.5 * (al[i] + al[i + 1]);
            for (long nn = 1; nn <= static_cast<long>(std::floor(s * mean_alpha / pd * (1 + 1e-12))); ++nn) {
                Vec omega = (nn / mean_alpha) * w;
                tie_found[i].push_back({omega, {{i, static_cast<int>(nn)}, {i + 1, static_cast<int>(nn)}}, false,
                                        {side.X[i], side.X[i + 1]}});
            }
        }
    }

    // (b) single resonances: p parallel to the half-line of plane i
    std::vector<std::vector<Candidate>> single(m * cells);
#pragma omp parallel for schedule(dynamic, 4) if (exec == Exec::Parallel)
    for (int t = 0; t < m * cells; ++t) {
        const int i = t / cells;
        const Node &A = nodes[t % cells], &B = nodes[t % cells + 1];
        double ha = det2(A.grad[i], p), hb = det2(B.grad[i], p);
        if ((ha < 0) == (hb < 0) && ha != 0.0) continue;
        auto h = [&](double th) {
            Node nd = eval_node(W, p, th);
            return det2(nd.grad[i], p);
        };
        double th = ha == 0.0 ? A.theta : bisect(h, A.theta, B.theta, ha, 1e-14 * p.norm());
        Node nd = eval_node(W, p, th);
        const Vec& g = nd.grad[i];
        // a jump of the gradient (tie or vanishing alpha) is not a root
        if (!(nd.alpha[i] > 1e-9) || std::abs(det2(g, p)) > 1e-8 * g.norm() * p.norm()) continue;
        if (g.dot(p) <= 0 || nd.pdot <= 0) continue;
        const long n_top = static_cast<long>(std::floor(s * nd.alpha[i] / nd.pdot * (1 + 1e-12)));
        for (long nn = 1; nn <= n_top; ++nn) {
            Vec omega = (nn / nd.alpha[i]) * circle_point(th);
            Candidate c{omega, {{i, static_cast<int>(nn)}}, false, {}};
            auto al = padded(skew_alphas(omega_matrix(W, omega)), m);
            for (int j = 0; j < m; ++j) {
                if (j == i) continue;
                double r = std::round(al[j]);
                if (r >= 1 && std::abs(al[j] - r) <= tol * r) {
                    c.res.push_back({j, static_cast<int>(r)});
                    c.boundary = true;
                }
            }
            single[t].push_back(std::move(c));
        }
    }

    std::vector<Candidate> all;
    for (auto* bucket : {&found, &tie_found, &single})
        for (auto& v : *bucket)
            for (auto& c : v) all.push_back(std::move(c));
    return merge(std::move(all));
}

// order-insensitive: equal energies may be ordered differently by round-off
bool same_census(const CensusReport& a, const CensusReport& b) {
    if (a.manifolds.size() != b.manifolds.size()) return false;
    std::vector<const CriticalManifold*> bs;
    for (const auto& m : b.manifolds) bs.push_back(&m);
    auto first = [](const CriticalManifold* m) { return m->omega(0); };
    std::sort(bs.begin(), bs.end(), [&](auto x, auto y) { return first(x) < first(y); });
    for (const auto& m : a.manifolds) {
        const double tol = 1e-7 * std::max(1.0, m.omega.norm());
        auto it = std::lower_bound(bs.begin(), bs.end(), m.omega(0) - tol,
                                   [&](auto x, double v) { return first(x) < v; });
        bool hit = false;
        for (; it != bs.end() && first(*it) <= m.omega(0) + tol && !hit; ++it)
            hit = (*it)->nu == m.nu && ((*it)->omega - m.omega).norm() <= tol;
        if (!hit) return false;
    }
    return true;
}

}  // namespace

CensusReport enumerate_l1(const CarnotStructure& W, double p, double s) {
    if (W.l != 1) throw Error(ErrorKind::Precondition, "enumerate_l1 needs corank 1");
    if (p == 0.0) throw Error(ErrorKind::ZeroTarget, "target must be nonzero");
    const auto beta = skew_spectrum(W.matrices[0]).alphas;
    const double sg = p > 0 ? 1.0 : -1.0;
    std::vector<Candidate> cands;
    for (size_t i = 0; i < beta.size(); ++i)
        for (long n = 1; n / beta[i] * std::abs(p) <= s * (1 + 1e-12); ++n)
            cands.push_back({Vec::Constant(1, sg * n / beta[i]), {{static_cast<int>(i), static_cast<int>(n)}}, false, {}});
    auto merged = merge(std::move(cands));
    CensusReport R;
    finish_report(R, W, Vec::Constant(1, p), s, merged, Exec::Serial);
    return R;
}

CensusReport enumerate_l2(const CarnotStructure& W, const Vec& p, double s, const CensusOptions& opt) {
    if (W.l != 2) throw Error(ErrorKind::Precondition, "enumerate_l2 needs corank 2");
    if (p.size() != 2) throw Error(ErrorKind::DimensionMismatch, "target must have 2 entries");
    if (p.norm() == 0.0) throw Error(ErrorKind::ZeroTarget, "target must be nonzero");
    if (opt.grid < 256) throw Error(ErrorKind::Precondition, "grid must be at least 256");
    if (!(opt.int_tol > 0)) throw Error(ErrorKind::Precondition, "integer tolerance must be positive");
    auto run = [&](int grid) {
        CensusReport R;
        R.grid = grid;
        finish_report(R, W, p, s, scan_l2(W, p, s, grid, opt.exec, opt.int_tol), opt.exec);
        return R;
    };
    CensusReport R = run(opt.grid);
    if (opt.check_refinement) {
        CensusReport F = run(2 * opt.grid);
        if (!same_census(R, F)) {
            F.grid_too_coarse = true;
            return F;
        }
    }
    return R;
}

CensusReport enumerate(const CarnotStructure& W, const Vec& p, double s, const CensusOptions& opt) {
    if (p.size() != W.l) throw Error(ErrorKind::DimensionMismatch, "target length differs from corank");
    if (W.l == 1) return enumerate_l1(W, p(0), s);
    if (W.l == 2) return enumerate_l2(W, p, s, opt);
    throw Error(ErrorKind::Precondition, "enumeration supports corank 1 and 2 only");
}

int manifold_index(const CarnotStructure& W, const Vec& omega) {
    auto a = skew_alphas(omega_matrix(W, omega));
    bool resonant = false;
    int count = 0;
    for (double x : a) {
        double r = std::round(x);
        if (r >= 1 && std::abs(x - r) <= kIntTol * r) resonant = true;
        for (int k = 1; x / k > 1 + kIntTol; ++k) ++count;
    }
    if (!resonant) throw Error(ErrorKind::NotAMultiplier, "no alpha_i(omega) is a positive integer");
    return 2 * count;
}

long long Polynomial::at_one() const {
    long long s = 0;
    for (long long c : coeffs) s += c;
    return s;
}

std::string Polynomial::str() const {
    std::string out;
    for (size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k] == 0) continue;
        if (!out.empty()) out += " + ";
        if (k == 0 || coeffs[k] != 1) out += std::to_string(coeffs[k]);
        if (k >= 1) out += "t";
        if (k >= 2) out += "^" + std::to_string(k);
    }
    return out.empty() ? "0" : out;
}

Polynomial morse_bott_polynomial(const CensusReport& report) {
    Polynomial P;
    for (const auto& m : report.manifolds) {
        // (1+t)^nu via binomials, shifted by the index
        std::vector<long long> b(m.nu + 1, 0);
        b[0] = 1;
        for (int r = 1; r <= m.nu; ++r)
            for (int k = r; k >= 1; --k) b[k] += b[k - 1];
        if (P.coeffs.size() < static_cast<size_t>(m.index + m.nu + 1)) P.coeffs.resize(m.index + m.nu + 1, 0);
        for (int k = 0; k <= m.nu; ++k) P.coeffs[m.index + k] += b[k];
    }
    return P;
}

TorusCheck torus_rank_check(const CarnotStructure& W, const Vec& p, const CriticalManifold& m) {
    const Vec& omega = m.omega;
    const Mat M = omega_matrix(W, omega);
    int L = 1;
    for (const Resonance& r : m.resonances) L = std::max(L, r.n);
    auto q = [&](const Vec& v) {
        return endpoint_quadratic(W, project_exponential(W, {omega, v}, L).control).vertical;
    };
    // basis of E(omega): the n-eigenspaces of the resonant planes
    Eigen::SelfAdjointEigenSolver<Mat> es(-M * M);
    std::vector<Vec> basis;
    std::vector<int> seen;
    for (const Resonance& r : m.resonances) {
        if (std::find(seen.begin(), seen.end(), r.n) != seen.end()) continue;
        seen.push_back(r.n);
        for (int k = 0; k < W.d; ++k)
            if (std::abs(es.eigenvalues()(k) - double(r.n) * r.n) <= 1e-6 * r.n * r.n)
                basis.push_back(es.eigenvectors().col(k));
    }
    const Vec& u0 = m.sample_control.u0;
    Mat D(W.l, basis.size());
    for (size_t c = 0; c < basis.size(); ++c) D.col(c) = 0.5 * (q(u0 + basis[c]) - q(u0 - basis[c]));
    Eigen::JacobiSVD<Mat> svd(D);
    const auto& sv = svd.singularValues();
    TorusCheck T;
    const double top = sv.size() ? sv(0) : 0.0;
    for (int k = 0; k < sv.size(); ++k)
        if (sv(k) > 1e-8 * top) ++T.rank;
    T.nullity = static_cast<int>(basis.size()) - T.rank;
    T.residual = (q(u0) - p).norm();
    // per-plane energy: pi |v_j|^2 = omega . q(v_j)
    std::vector<int> done;
    for (const Resonance& r : m.resonances) {
        if (std::find(done.begin(), done.end(), r.n) != done.end()) continue;
        done.push_back(r.n);
        Vec vj = Vec::Zero(W.d);
        for (int k = 0; k < W.d; ++k)
            if (std::abs(es.eigenvalues()(k) - double(r.n) * r.n) <= 1e-6 * r.n * r.n) {
                Vec e = es.eigenvectors().col(k);
                vj += e.dot(u0) * e;
            }
        double err = std::abs(kPi * vj.squaredNorm() - omega.dot(q(vj)));
        T.plane_energy_err = std::max(T.plane_energy_err, err);
    }
    if (T.residual > 1e-7 * std::max(1.0, p.norm()))
        throw Error(ErrorKind::ConsistencyFailure, "sample control misses the target");
    if (T.rank != std::min(W.l, m.nu) || T.nullity != m.nu)
        throw Error(ErrorKind::RankMismatch, "rank " + std::to_string(T.rank) + ", nullity " +
                                                 std::to_string(T.nullity) + " for nu=" + std::to_string(m.nu));
    return T;
}

GrowthTable growth_diagnostics(const CarnotStructure& W, const Vec& p, const std::vector<double>& s_list,
                               const CensusOptions& opt) {
    GrowthTable T;
    if (s_list.empty()) return T;
    for (size_t k = 1; k < s_list.size(); ++k)
        if (!(s_list[k] > s_list[k - 1])) throw Error(ErrorKind::Precondition, "s_list must increase");
    const CensusReport R = enumerate(W, p, s_list.back(), opt);
    for (double s : s_list) {
        GrowthRow row;
        row.s = s;
        for (const auto& m : R.manifolds) {
            if (m.energy > s * (1 + 1e-12)) break;
            ++row.count;
            row.cone_constant = std::max(row.cone_constant, m.omega.norm() / m.energy);
            for (const Resonance& r : m.resonances) row.max_wave = std::max(row.max_wave, r.n);
        }
        row.wave_bound = static_cast<int>(std::floor(row.cone_constant * s));
        T.rows.push_back(row);
    }
    std::vector<double> xs, ys;
    for (const auto& r : T.rows)
        if (r.count > 0) {
            xs.push_back(std::log(r.s));
            ys.push_back(std::log(static_cast<double>(r.count)));
        }
    if (xs.size() >= 2) {
        double mx = 0, my = 0;
        for (size_t k = 0; k < xs.size(); ++k) mx += xs[k], my += ys[k];
        mx /= xs.size();
        my /= ys.size();
        double sxy = 0, sxx = 0;
        for (size_t k = 0; k < xs.size(); ++k) sxy += (xs[k] - mx) * (ys[k] - my), sxx += (xs[k] - mx) * (xs[k] - mx);
        T.exponent = sxy / sxx;
    }
    return T;
}

double base_energy(const CarnotStructure& W, const Vec& p, const CensusOptions& opt) {
    if (p.size() != W.l) throw Error(ErrorKind::DimensionMismatch, "target length differs from corank");
    if (p.norm() == 0.0) throw Error(ErrorKind::ZeroTarget, "target must be nonzero");
    if (W.l == 1) {
        auto al = skew_spectrum(W.matrices[0]).alphas;
        if (al.empty()) throw Error(ErrorKind::Precondition, "structure has no positive alpha");
        return std::abs(p(0)) / al[0];
    }
    // no closed form: grow s until the census is nonempty
    double kappa = 0.0;
    for (int k = 0; k < 64; ++k)
        kappa = std::max(kappa, skew_alphas(omega_matrix(W, circle_point(std::numbers::pi * k / 32)))[0]);
    CensusOptions o = opt;
    o.check_refinement = false;
    double s = p.norm() / std::max(kappa, 1e-300);
    for (int it = 0; it < 80; ++it, s *= 2) {
        auto R = enumerate_l2(W, p, s, o);
        if (!R.manifolds.empty()) return R.manifolds.front().energy;
    }
    throw Error(ErrorKind::NoConvergence, "no critical manifold found below 2^80 times the start level");
}

}  // namespace carnot
