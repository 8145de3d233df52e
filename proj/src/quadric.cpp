#include "carnot/quadric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "carnot/endpoint.hpp"

namespace carnot {

namespace {

const double kPi = std::numbers::pi;
const double kTwoPi = 2 * std::numbers::pi;

double wrap(double x) {
    x = std::fmod(x, kTwoPi);
    return x < 0 ? x + kTwoPi : x;
}

struct Inertia {
    int neg = 0;
    int zero = 0;
};

Inertia inertia(const Mat& F, double tol) {
    Eigen::SelfAdjointEigenSolver<Mat> es(F, Eigen::EigenvaluesOnly);
    Inertia r;
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
        double e = es.eigenvalues()(k);
        if (e < -tol) ++r.neg;
        else if (e <= tol) ++r.zero;
    }
    return r;
}

// drops breakpoints whose two sides carry the same value
void canonicalize(IndexProfile& P) {
    if (P.full_circle) {
        const size_t B = P.breakpoints.size();
        if (B == 0) return;
        std::vector<double> bp;
        std::vector<int> v;
        for (size_t k = 0; k < B; ++k) {
            int before = P.values[(k + B - 1) % B];
            if (before != P.values[k]) {
                bp.push_back(P.breakpoints[k]);
                v.push_back(P.values[k]);
            }
        }
        if (bp.empty()) {
            P.breakpoints.clear();
            P.values = {P.values[0]};
        } else {
            P.breakpoints = bp;
            P.values = v;
        }
        return;
    }
    std::vector<double> bp;
    std::vector<int> v = {P.values.empty() ? 0 : P.values[0]};
    for (size_t k = 0; k < P.breakpoints.size(); ++k) {
        if (P.values[k + 1] == v.back()) continue;
        bp.push_back(P.breakpoints[k]);
        v.push_back(P.values[k + 1]);
    }
    P.breakpoints = bp;
    P.values = v;
}

// wrapped containment: x in [a, b]
bool on_arc(double a, double b, double x, double eps) { return wrap(x - a + eps) <= (b - a) + 2 * eps; }

}  // namespace

int IndexProfile::max_value() const {
    int m = 0;
    for (int v : values) m = std::max(m, v);
    return m;
}

int BettiTable::top_degree() const {
    int t = -1;
    for (auto& [j, b] : reduced)
        if (b > 0) t = std::max(t, j);
    return t;
}

IndexProfile index_profile_finite(const Mat& q1, const Mat& q2, int grid) {
    const int N = static_cast<int>(q1.rows());
    if (N < 3 || q1.cols() != N || q2.rows() != N || q2.cols() != N)
        throw Error(ErrorKind::BadDimensions, "forms must be N x N with N >= 3");
    if ((q1 - q1.transpose()).norm() > 1e-12 * std::max(1.0, q1.norm()) ||
        (q2 - q2.transpose()).norm() > 1e-12 * std::max(1.0, q2.norm()))
        throw Error(ErrorKind::Precondition, "forms must be symmetric");
    if (grid < 16) throw Error(ErrorKind::Precondition, "grid must be at least 16");
    const double tol = 1e-10 * std::max(q1.norm(), q2.norm());
    auto at = [&](double t) { return inertia(std::cos(t) * q1 + std::sin(t) * q2, tol); };

    const double h = kTwoPi / grid, off = 0.37 * h;  // offset keeps nodes off the axes
    std::vector<Inertia> node(grid);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < grid; ++k) node[k] = at(off + k * h);

    IndexProfile P;
    P.full_circle = true;
    P.form_dim = N;
    for (int k = 0; k < grid; ++k)
        if (node[k].zero > 0 && node[(k + 1) % grid].zero > 0) P.degenerate = true;

    // every value change between nodes, split recursively to width 1e-10
    std::vector<std::pair<double, int>> changes;  // (angle, value to the right)
    for (int k = 0; k < grid; ++k) {
        const double a = off + k * h, b = a + h;
        const int va = node[k].neg, vb = node[(k + 1) % grid].neg;
        if (va == vb) continue;
        std::vector<std::tuple<double, double, int, int>> stack = {{a, b, va, vb}};
        std::vector<std::pair<double, int>> local;
        while (!stack.empty()) {
            auto [x, y, vx, vy] = stack.back();
            stack.pop_back();
            if (y - x <= 1e-10) {
                local.push_back({0.5 * (x + y), vy});
                continue;
            }
            double m = 0.5 * (x + y);
            int vm = at(m).neg;
            if (vm != vx) stack.push_back({x, m, vx, vm});
            if (vm != vy) stack.push_back({m, y, vm, vy});
        }
        std::sort(local.begin(), local.end());
        for (auto& c : local) changes.push_back({wrap(c.first), c.second});
    }
    std::sort(changes.begin(), changes.end());
    if (changes.empty()) {
        P.values = {node[0].neg};
        return P;
    }
    // several eigenvalues crossing together leave a cluster of changes inside the
    // zero tolerance band; keep one breakpoint with the value to its right
    const double band = 1e-8;
    const size_t C = changes.size();
    auto gap_before = [&](size_t k) { return wrap(changes[k].first - changes[(k + C - 1) % C].first); };
    size_t first = 0;  // a change with a real gap before it starts a cluster
    while (first < C && C > 1 && gap_before(first) < band) ++first;
    if (first == C) first = 0;
    for (size_t n = 0; n < C;) {
        const size_t k0 = (first + n) % C;
        size_t len = 1;
        while (n + len < C &&
               wrap(changes[(k0 + len) % C].first - changes[(k0 + len - 1) % C].first) < band)
            ++len;
        const double a = changes[k0].first;
        const double b = a + wrap(changes[(k0 + len - 1) % C].first - a);
        P.breakpoints.push_back(wrap(0.5 * (a + b)));
        P.values.push_back(changes[(k0 + len - 1) % C].second);
        n += len;
    }
    // keep breakpoints ascending
    std::vector<size_t> ord(P.breakpoints.size());
    for (size_t k = 0; k < ord.size(); ++k) ord[k] = k;
    std::sort(ord.begin(), ord.end(), [&](size_t x, size_t y) { return P.breakpoints[x] < P.breakpoints[y]; });
    std::vector<double> bp;
    std::vector<int> vv;
    for (size_t k : ord) {
        bp.push_back(P.breakpoints[k]);
        vv.push_back(P.values[k]);
    }
    P.breakpoints = bp;
    P.values = vv;
    canonicalize(P);
    return P;
}

IndexProfile index_profile_analytic(const CarnotStructure& W, const Vec& p, double s, const AnalyticOptions& opt) {
    if (p.size() != W.l) throw Error(ErrorKind::DimensionMismatch, "target length differs from corank");
    if (p.norm() == 0.0) throw Error(ErrorKind::ZeroTarget, "target must be nonzero");
    if (!(s > 0)) throw Error(ErrorKind::Precondition, "s must be positive");
    IndexProfile P;
    if (W.l == 1) {
        // admissible covectors: the single point omega = -sign(p)
        const double z = std::abs(p(0));
        int v = 0;
        for (double b : skew_spectrum(W.matrices[0]).alphas) {
            const double x = s * b / z;
            v += 2 * static_cast<int>(std::floor(x));
            if (std::abs(x - std::round(x)) <= 1e-9 * std::max(1.0, x) && std::round(x) >= 1) P.degenerate = true;
        }
        P.lo = P.hi = p(0) > 0 ? kPi : 0.0;
        P.values = {v};
        return P;
    }
    if (W.l != 2) throw Error(ErrorKind::Precondition, "analytic profile needs corank 1 or 2");
    if (opt.grid < 64) throw Error(ErrorKind::Precondition, "grid must be at least 64");
    const int m = W.d / 2;
    const double a0 = std::atan2(p(1), p(0)) + kPi / 2;  // <omega, p> < 0 on (a0, a0 + pi)

    double scale = 0;
    for (const Mat& A : W.matrices) scale = std::max(scale, A.norm());
    for (double t : {a0, a0 + kPi}) {
        auto al = skew_alphas(omega_matrix(W, circle_point(t)));
        for (double a : al)
            if (a <= 1e-9 * scale)
                throw Error(ErrorKind::NonGenericTarget, "an eigenvalue curve vanishes where <omega, p> = 0");
    }

    struct Sample {
        std::vector<double> lam, dlam;
    };
    auto sample = [&](double t) {
        Vec w = circle_point(t), dw(2);
        dw << -std::sin(t), std::cos(t);
        const double pd = -w.dot(p), dpd = -dw.dot(p);  // |<omega, p>| and its derivative
        auto S = skew_spectrum(omega_matrix(W, w));
        Sample r;
        r.lam.assign(m, 0.0);
        r.dlam.assign(m, 0.0);
        for (int i = 0; i < static_cast<int>(S.alphas.size()); ++i) {
            double a = S.alphas[i];
            double da = plane_gradient(W, S, i).dot(dw);  // Hellmann-Feynman
            r.lam[i] = a / pd;
            r.dlam[i] = (da * pd - a * dpd) / (pd * pd);
        }
        return r;
    };
    const int G = opt.grid;
    std::vector<double> th(G);
    std::vector<Sample> node(G);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < G; ++k) {
        th[k] = a0 + kPi * (k + 0.5) / G;
        node[k] = sample(th[k]);
    }
    auto all_sign = [&](int k, bool neg) {
        for (int i = 0; i < m; ++i)
            if (neg ? !(node[k].dlam[i] < 0) : !(node[k].dlam[i] > 0)) return false;
        return true;
    };
    // beyond the clip every lambda grows toward the end of the arc
    int kL = 0, kR = G - 1;
    while (kL + 1 < G && all_sign(kL + 1, true) && all_sign(kL, true)) ++kL;
    while (kR - 1 > kL && all_sign(kR - 1, false) && all_sign(kR, false)) --kR;
    P.lo = th[kL];
    P.hi = th[kR];

    std::vector<double> bps;
    std::vector<int> owner;  // curve of each breakpoint
    for (int i = 0; i < m; ++i) {
        // monotone pieces of lambda_i on [lo, hi]
        std::vector<double> cuts = {th[kL]};
        for (int k = kL; k < kR; ++k) {
            double d0 = node[k].dlam[i], d1 = node[k + 1].dlam[i];
            if ((d0 > 0) == (d1 > 0)) continue;
            double x = th[k], y = th[k + 1];
            bool up = d0 > 0;
            while (y - x > 1e-13) {
                double c = 0.5 * (x + y);
                if ((sample(c).dlam[i] > 0) == up) x = c;
                else y = c;
            }
            cuts.push_back(0.5 * (x + y));
        }
        cuts.push_back(th[kR]);
        for (size_t c = 0; c + 1 < cuts.size(); ++c) {
            double x0 = cuts[c], x1 = cuts[c + 1];
            double v0 = s * sample(x0).lam[i], v1 = s * sample(x1).lam[i];
            bool inc = v1 > v0;
            long k0 = static_cast<long>(std::floor(std::min(v0, v1))) + 1;
            long k1 = static_cast<long>(std::ceil(std::max(v0, v1))) - 1;
            for (long q = k0; q <= k1; ++q) {
                double x = x0, y = x1;
                while (y - x > 1e-13) {
                    double c = 0.5 * (x + y);
                    if ((s * sample(c).lam[i] < q) == inc) x = c;
                    else y = c;
                }
                bps.push_back(0.5 * (x + y));
                owner.push_back(i);
            }
        }
    }
    {
        // two curves crossing an integer at the same angle: s is a critical energy
        std::vector<size_t> ord(bps.size());
        for (size_t k = 0; k < ord.size(); ++k) ord[k] = k;
        std::sort(ord.begin(), ord.end(), [&](size_t x, size_t y) { return bps[x] < bps[y]; });
        for (size_t k = 0; k + 1 < ord.size(); ++k)
            if (bps[ord[k + 1]] - bps[ord[k]] < 1e-9 && owner[ord[k]] != owner[ord[k + 1]]) P.degenerate = true;
    }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end(), [](double a, double b) { return b - a <= 1e-12; }), bps.end());
    std::vector<double> edges = {P.lo};
    edges.insert(edges.end(), bps.begin(), bps.end());
    edges.push_back(P.hi);
    P.values.resize(edges.size() - 1);
    const int n_iv = static_cast<int>(P.values.size());
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n_iv; ++k) {
        auto r = sample(0.5 * (edges[k] + edges[k + 1]));
        int v = 0;
        for (double l : r.lam) v += 2 * static_cast<int>(std::floor(s * l));
        P.values[k] = v;
    }
    P.breakpoints = bps;
    canonicalize(P);
    return P;
}

ArcSet sublevel_arcs(const IndexProfile& P, int j) {
    ArcSet A;
    if (P.point()) {
        if (P.values[0] <= j) A.arcs.push_back({wrap(P.lo), wrap(P.lo)});
        return A;
    }
    const int B = static_cast<int>(P.breakpoints.size());
    if (!P.full_circle) {
        int k = 0;
        while (k <= B) {
            if (P.values[k] > j) {
                ++k;
                continue;
            }
            int e = k;
            while (e + 1 <= B && P.values[e + 1] <= j) ++e;
            double a = k == 0 ? P.lo : P.breakpoints[k - 1];
            double b = e == B ? P.hi : P.breakpoints[e];
            A.arcs.push_back({wrap(a), wrap(a) + (b - a)});
            k = e + 1;
        }
        return A;
    }
    if (B == 0) {
        A.full = P.values[0] <= j;
        return A;
    }
    int start = -1;
    for (int k = 0; k < B; ++k)
        if (P.values[k] > j) start = k;
    if (start < 0) {
        A.full = true;
        return A;
    }
    // interval k spans (bp[k], bp[k+1]); walk once around from a high interval
    int k = (start + 1) % B;
    for (int steps = 0; steps < B;) {
        if (P.values[k] > j) {
            k = (k + 1) % B;
            ++steps;
            continue;
        }
        int first = k;
        int len = 0;
        while (P.values[k] <= j && steps < B) {
            ++len;
            k = (k + 1) % B;
            ++steps;
        }
        double a = P.breakpoints[first];
        double b = P.breakpoints[(first + len) % B];
        if (b <= a) b += kTwoPi;
        A.arcs.push_back({wrap(a), wrap(a) + (b - a)});
    }
    std::sort(A.arcs.begin(), A.arcs.end());
    return A;
}

RelativeBetti relative_betti(const ArcSet& A, const ArcSet& B) {
    const double eps = 1e-12;
    RelativeBetti r;
    if (B.full) {
        if (!A.full) throw Error(ErrorKind::NotNested, "full circle is not inside a proper arc set");
        return r;
    }
    if (A.full) {
        r.b0 = B.empty() ? 1 : 0;
        r.b1 = B.empty() ? 1 : B.components();
        return r;
    }
    std::vector<int> inside(A.arcs.size(), 0);
    for (const auto& [c, d] : B.arcs) {
        bool placed = false;
        for (size_t k = 0; k < A.arcs.size() && !placed; ++k) {
            const auto& [a, b] = A.arcs[k];
            if (on_arc(a, b, c, eps) && wrap(c - a + eps) - eps + (d - c) <= (b - a) + eps) {
                ++inside[k];
                placed = true;
            }
        }
        if (!placed) throw Error(ErrorKind::NotNested, "a component of B leaves A");
    }
    for (int n : inside) {
        if (n == 0) ++r.b0;
        r.b1 += std::max(0, n - 1);
    }
    return r;
}

BettiTable betti_from_profile(const IndexProfile& P) {
    BettiTable T;
    const int top_value = P.max_value();
    std::vector<ArcSet> S(top_value + 4);
    for (int j = 0; j < static_cast<int>(S.size()); ++j) S[j] = sublevel_arcs(P, j);
    if (!S[0].empty()) {
        // some pencil member is positive definite on the constraint: no points
        T.empty_set = true;
        T.total = 0;
        return T;
    }
    auto btilde = [&](int j) { return relative_betti(S[j + 1], S[j]).b0 + relative_betti(S[j + 2], S[j + 1]).b1; };
    if (P.full_circle) {
        const int n = P.form_dim - 1;  // the zero set lives on S^n
        const int top = n - 2;
        for (int j = 0; j <= std::min(n - 3, top_value + 1); ++j)
            if (int b = btilde(j)) T.reduced[j] = b;
        if (top >= 1) {
            // Poincare duality with Z2 coefficients fills the degree the formula misses
            T.reduced[top] += 1 + (T.reduced.count(0) ? T.reduced[0] : 0);
        } else {
            T.guard_violated = true;
        }
    } else {
        for (int j = 0; j <= top_value + 1; ++j)
            if (int b = btilde(j)) T.reduced[j] = b;
    }
    T.total = 1;
    for (auto& [j, b] : T.reduced) T.total += b;
    return T;
}

int total_betti_via_maxima(const IndexProfile& P) {
    const auto& v = P.values;
    const int n = static_cast<int>(v.size());
    int mu = 0;
    for (int k = 0; k < n; ++k) {
        bool left, right;
        if (P.full_circle) {
            if (n < 2) break;
            left = v[(k + n - 1) % n] < v[k];
            right = v[(k + 1) % n] < v[k];
        } else {
            // +infinity beyond both ends of the arc
            left = k > 0 && v[k - 1] < v[k];
            right = k + 1 < n && v[k + 1] < v[k];
        }
        if (left && right) ++mu;
    }
    return 2 * mu + 2 - sublevel_arcs(P, 0).components();
}

std::pair<Mat, Mat> single_quadric_pencil(const Mat& q1) {
    const int N = static_cast<int>(q1.rows());
    Mat A = Mat::Zero(N + 1, N + 1), B = Mat::Zero(N + 1, N + 1);
    A.topLeftCorner(N, N) = q1;
    B(N, N) = 1.0;
    return {A, B};
}

std::pair<Mat, Mat> truncated_pencil(const CarnotStructure& W, const Vec& p, double s, int L) {
    if (W.l != 2) throw Error(ErrorKind::Precondition, "truncated_pencil needs corank 2");
    Mat F1 = vertical_gram(W, 0, L), F2 = vertical_gram(W, 1, L);
    const Mat I = Mat::Identity(F1.rows(), F1.cols());
    F1 -= p(0) / (2 * s) * I;
    F2 -= p(1) / (2 * s) * I;
    return {F1, F2};
}

}  // namespace carnot
