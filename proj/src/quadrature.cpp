#include "carnot/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <queue>

namespace carnot {

GaussRule gauss_legendre(int n) {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        double b = i / std::sqrt(4.0 * i * i - 1.0);
        T(i, i - 1) = T(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    GaussRule r;
    for (int i = 0; i < n; ++i) {
        r.x.push_back(es.eigenvalues()(i));
        double v = es.eigenvectors()(0, i);
        r.w.push_back(2.0 * v * v);
    }
    return r;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int panels, int order) {
    static thread_local int cached_order = -1;
    static thread_local GaussRule rule;
    if (cached_order != order) {
        rule = gauss_legendre(order);
        cached_order = order;
    }
    const double h = (b - a) / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        double c = a + (p + 0.5) * h;
        for (int i = 0; i < order; ++i) s += rule.w[i] * f(c + 0.5 * h * rule.x[i]);
    }
    return 0.5 * h * s;
}

namespace {

// Kronrod 15 nodes on [0,1] (symmetric), Gauss 7 weights on the odd ones
constexpr double xk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                          0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                          0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                          0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                          0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                          0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                          0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double k = wk[7] * fc, g = wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        double f1 = f(c - h * xk[i]), f2 = f(c + h * xk[i]);
        k += wk[i] * (f1 + f2);
        if (i % 2 == 1) g += wg[i / 2] * (f1 + f2);
    }
    return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, double rel_tol, int max_intervals) {
    AdaptiveResult R;
    if (b <= a) return R;
    std::priority_queue<Piece> heap;
    Piece first = gk15(f, a, b);
    heap.push(first);
    double total = first.value, err = first.error;
    R.evaluations = 15;
    int count = 1;
    while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (count >= max_intervals) {
            R.converged = false;
            break;
        }
        Piece p = heap.top();
        heap.pop();
        double m = 0.5 * (p.a + p.b);
        Piece l = gk15(f, p.a, m), r = gk15(f, m, p.b);
        R.evaluations += 30;
        total += l.value + r.value - p.value;
        err += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
        ++count;
    }
    // re-sum in interval order so the result does not depend on heap history
    std::vector<Piece> all;
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
    R.value = 0.0;
    R.error = 0.0;
    for (const Piece& p : all) {
        R.value += p.value;
        R.error += p.error;
    }
    return R;
}

}  // namespace carnot
