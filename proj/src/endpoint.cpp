#include "carnot/endpoint.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "carnot/quadrature.hpp"

namespace carnot {

namespace {
constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);
const double kSqrt2Pi = std::sqrt(2.0 * kPi);

void check_dims(const CarnotStructure& W, const Control& u) {
    if (u.d() != W.d) throw Error(ErrorKind::DimensionMismatch, "control dimension differs from structure");
    if (static_cast<int>(u.U.size()) != u.L || static_cast<int>(u.V.size()) != u.L)
        throw Error(ErrorKind::DimensionMismatch, "coefficient list length differs from L");
}
}  // namespace

Control Control::zero(int d, int L) {
    Control u;
    u.L = L;
    u.mean = Vec::Zero(d);
    u.U.assign(L, Vec::Zero(d));
    u.V.assign(L, Vec::Zero(d));
    return u;
}

Vec Control::eval(double t) const {
    Vec out = mean / kSqrt2Pi;
    for (int k = 1; k <= L; ++k) out += (U[k - 1] * std::cos(k * t) + V[k - 1] * std::sin(k * t)) / kSqrtPi;
    return out;
}

Control Control::scaled(double c) const {
    Control u = *this;
    u.mean *= c;
    for (auto& x : u.U) x *= c;
    for (auto& x : u.V) x *= c;
    return u;
}

Vec control_to_vector(const Control& u) {
    const int d = u.d();
    Vec z(2 * d * u.L);
    for (int k = 0; k < u.L; ++k) {
        z.segment(2 * d * k, d) = u.U[k];
        z.segment(2 * d * k + d, d) = u.V[k];
    }
    return z;
}

Control control_from_vector(const Vec& z, int d) {
    const int L = static_cast<int>(z.size()) / (2 * d);
    Control u = Control::zero(d, L);
    for (int k = 0; k < L; ++k) {
        u.U[k] = z.segment(2 * d * k, d);
        u.V[k] = z.segment(2 * d * k + d, d);
    }
    return u;
}

double energy(const Control& u) {
    double s = u.mean.squaredNorm();
    for (int k = 0; k < u.L; ++k) s += u.U[k].squaredNorm() + u.V[k].squaredNorm();
    return 0.5 * s;
}

EndPoint endpoint_quadratic(const CarnotStructure& W, const Control& u) {
    check_dims(W, u);
    EndPoint E{u.mean * kSqrt2Pi, Vec::Zero(W.l)};
    if (u.zero_mean()) {
        for (int i = 0; i < W.l; ++i)
            for (int k = 1; k <= u.L; ++k)
                E.vertical(i) += u.U[k - 1].dot(W.matrices[i] * u.V[k - 1]) / k;
        return E;
    }
    // x(t) = c t + sum_k (U_k sin kt + V_k (1 - cos kt)) / (k sqrt(pi))
    const Vec c = u.mean / kSqrt2Pi;
    auto x_of = [&](double t) {
        Vec x = c * t;
        for (int k = 1; k <= u.L; ++k)
            x += (u.U[k - 1] * std::sin(k * t) + u.V[k - 1] * (1.0 - std::cos(k * t))) / (k * kSqrtPi);
        return x;
    };
    const int order = 8;
    const int panels = 4 * (u.L + 1);
    GaussRule rule = gauss_legendre(order);
    const double h = 2.0 * kPi / panels;
    for (int p = 0; p < panels; ++p) {
        double mid = (p + 0.5) * h;
        for (int j = 0; j < order; ++j) {
            double t = mid + 0.5 * h * rule.x[j];
            Vec x = x_of(t), ut = u.eval(t);
            for (int i = 0; i < W.l; ++i)
                E.vertical(i) += 0.5 * h * rule.w[j] * 0.5 * x.dot(W.matrices[i] * ut);
        }
    }
    return E;
}

namespace {

template <class Sink>
void rk4(const CarnotStructure& W, const Control& u, int steps, Sink&& sink) {
    const int d = W.d, l = W.l;
    Vec x = Vec::Zero(d), y = Vec::Zero(l);
    const double h = 2.0 * kPi / steps;
    auto dy = [&](const Vec& xx, const Vec& uu) {
        Vec r(l);
        for (int i = 0; i < l; ++i) r(i) = 0.5 * xx.dot(W.matrices[i] * uu);
        return r;
    };
    sink(0.0, x, y);
    for (int s = 0; s < steps; ++s) {
        double t = s * h;
        Vec u1 = u.eval(t), u2 = u.eval(t + 0.5 * h), u4 = u.eval(t + h);
        Vec kx1 = u1, ky1 = dy(x, u1);
        Vec x2 = x + 0.5 * h * kx1;
        Vec kx2 = u2, ky2 = dy(x2, u2);
        Vec x3 = x + 0.5 * h * kx2;
        Vec kx3 = u2, ky3 = dy(x3, u2);
        Vec x4 = x + h * kx3;
        Vec kx4 = u4, ky4 = dy(x4, u4);
        x += h / 6.0 * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4);
        y += h / 6.0 * (ky1 + 2.0 * ky2 + 2.0 * ky3 + ky4);
        sink(t + h, x, y);
    }
}

}  // namespace

EndPoint endpoint_ode(const CarnotStructure& W, const Control& u, int steps) {
    check_dims(W, u);
    if (steps < 64) throw Error(ErrorKind::Precondition, "endpoint_ode needs steps >= 64");
    EndPoint E;
    rk4(W, u, steps, [&](double, const Vec& x, const Vec& y) {
        E.horizontal = x;
        E.vertical = y;
    });
    return E;
}

std::vector<TrajectorySample> trajectory(const CarnotStructure& W, const Control& u, int steps) {
    check_dims(W, u);
    if (steps < 64) throw Error(ErrorKind::Precondition, "trajectory needs steps >= 64");
    std::vector<TrajectorySample> out;
    rk4(W, u, steps, [&](double t, const Vec& x, const Vec& y) { out.push_back({t, x, y}); });
    return out;
}

ExpFlow::ExpFlow(const Mat& M) : M_(M), S_(skew_spectrum(M)) {}

Vec ExpFlow::apply(double t, const Vec& v) const {
    Vec r = S_.kernel_frame * (S_.kernel_frame.transpose() * v);
    for (size_t i = 0; i < S_.alphas.size(); ++i) {
        double a = S_.X[i].dot(v), b = S_.Y[i].dot(v);
        double c = std::cos(S_.alphas[i] * t), s = std::sin(S_.alphas[i] * t);
        r += (c * a - s * b) * S_.X[i] + (s * a + c * b) * S_.Y[i];
    }
    return r;
}

Mat ExpFlow::exp_minus(double t) const {
    Mat E = S_.kernel_frame * S_.kernel_frame.transpose();
    for (size_t i = 0; i < S_.alphas.size(); ++i) {
        const Vec &X = S_.X[i], &Y = S_.Y[i];
        double c = std::cos(S_.alphas[i] * t), s = std::sin(S_.alphas[i] * t);
        E += c * (X * X.transpose() + Y * Y.transpose()) + s * (Y * X.transpose() - X * Y.transpose());
    }
    return E;
}

Mat ExpFlow::integral_plus(double t) const {
    Mat G = t * S_.kernel_frame * S_.kernel_frame.transpose();
    for (size_t i = 0; i < S_.alphas.size(); ++i) {
        const Vec &X = S_.X[i], &Y = S_.Y[i];
        double a = S_.alphas[i];
        double si = std::sin(a * t) / a;
        double sh = std::sin(0.5 * a * t);
        double co = 2.0 * sh * sh / a;
        G += si * (X * X.transpose() + Y * Y.transpose()) + co * (X * Y.transpose() - Y * X.transpose());
    }
    return G;
}

Vec ExpFlow::integral_minus(double t, const Vec& v) const {
    Vec r = t * S_.kernel_frame * (S_.kernel_frame.transpose() * v);
    for (size_t i = 0; i < S_.alphas.size(); ++i) {
        double a = S_.X[i].dot(v), b = S_.Y[i].dot(v);
        double al = S_.alphas[i];
        double si = std::sin(al * t) / al;
        double sh = std::sin(0.5 * al * t);
        double co = 2.0 * sh * sh / al;
        r += (si * a - co * b) * S_.X[i] + (co * a + si * b) * S_.Y[i];
    }
    return r;
}

namespace {

// closed form of int_0^{2pi} exp(i nu t) dt
std::complex<double> trig_moment(double nu) {
    if (std::abs(nu) < 1e-14) return {2.0 * kPi, 0.0};
    double th = 2.0 * kPi * nu;
    double sh = std::sin(0.5 * th);
    return {std::sin(th) / nu, 2.0 * sh * sh / nu};
}

}  // namespace

Projection project_exponential(const CarnotStructure& W, const ExponentialControl& e, int L) {
    if (e.omega.size() != W.l || e.u0.size() != W.d)
        throw Error(ErrorKind::DimensionMismatch, "exponential control dimensions differ from structure");
    if (L < 1) throw Error(ErrorKind::Precondition, "L must be positive");
    const Mat M = omega_matrix(W, e.omega);
    const SkewSpectrum S = skew_spectrum(M);
    const Vec& u0 = e.u0;
    const double scale = std::max(u0.norm(), std::numeric_limits<double>::min());

    Projection P;
    P.control = Control::zero(W.d, L);
    Control& c = P.control;
    c.mean = kSqrt2Pi * (S.kernel_frame * (S.kernel_frame.transpose() * u0));

    struct Active {
        int plane;
        double a, b;
    };
    std::vector<Active> act;
    bool exact = true;
    double max_alpha = 0.0;
    for (size_t i = 0; i < S.alphas.size(); ++i) {
        double a = S.X[i].dot(u0), b = S.Y[i].dot(u0);
        if (std::hypot(a, b) <= 1e-12 * scale) continue;
        act.push_back({static_cast<int>(i), a, b});
        double al = S.alphas[i];
        max_alpha = std::max(max_alpha, al);
        double n = std::round(al);
        if (n < 1.0 || std::abs(al - n) > 1e-9) exact = false;
    }
    P.exact = exact;
    if (exact) {
        for (const Active& x : act) {
            int n = static_cast<int>(std::round(S.alphas[x.plane]));
            if (n > L)
                throw Error(ErrorKind::TruncationTooSmall,
                            "resonant wave number " + std::to_string(n) + " exceeds L=" + std::to_string(L));
            const Vec &X = S.X[x.plane], &Y = S.Y[x.plane];
            double ratio = S.alphas[x.plane] / n;
            // phi_n(v) = sqrt(pi) (v, -M v / n) with M v = alpha (b X - a Y)
            c.U[n - 1] += kSqrtPi * (x.a * X + x.b * Y);
            c.V[n - 1] += kSqrtPi * ratio * (x.a * Y - x.b * X);
        }
        P.tail_mass = 0.0;
        return P;
    }
    const int need = static_cast<int>(std::ceil(max_alpha)) + 1;
    if (L < need)
        throw Error(ErrorKind::TruncationTooSmall,
                    "non-periodic control needs L >= " + std::to_string(need));
    for (const Active& x : act) {
        const Vec &X = S.X[x.plane], &Y = S.Y[x.plane];
        const double al = S.alphas[x.plane];
        auto I0 = trig_moment(al);
        c.mean += ((x.a * I0.real() - x.b * I0.imag()) * X + (x.a * I0.imag() + x.b * I0.real()) * Y) / kSqrt2Pi;
        for (int k = 1; k <= L; ++k) {
            auto Im = trig_moment(al - k), Ip = trig_moment(al + k);
            double Icc = 0.5 * (Im.real() + Ip.real());
            double Isc = 0.5 * (Ip.imag() + Im.imag());
            double Ics = 0.5 * (Ip.imag() - Im.imag());
            double Iss = 0.5 * (Im.real() - Ip.real());
            c.U[k - 1] += ((x.a * Icc - x.b * Isc) * X + (x.a * Isc + x.b * Icc) * Y) / kSqrtPi;
            c.V[k - 1] += ((x.a * Ics - x.b * Iss) * X + (x.a * Iss + x.b * Ics) * Y) / kSqrtPi;
        }
    }
    P.tail_mass = std::max(0.0, 2.0 * kPi * u0.squaredNorm() - 2.0 * energy(c));
    return P;
}

std::vector<Mat> l_matrices(const CarnotStructure& W, const Vec& omega, int intervals) {
    if (intervals < 2 || intervals % 2) throw Error(ErrorKind::Precondition, "Simpson needs an even interval count");
    ExpFlow F(omega_matrix(W, omega));
    std::vector<Mat> L(W.l, Mat::Zero(W.d, W.d));
    const double h = 2.0 * kPi / intervals;
    for (int j = 0; j <= intervals; ++j) {
        double t = j * h;
        double w = (j == 0 || j == intervals) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        w *= h / 3.0;
        Mat G = F.integral_plus(t), E = F.exp_minus(t);
        for (int i = 0; i < W.l; ++i) L[i].noalias() += (0.5 * w) * (G * W.matrices[i] * E);
    }
    return L;
}

EndPoint shoot(const CarnotStructure& W, const ExponentialControl& e, const ShootOptions& opt) {
    if (e.omega.size() != W.l || e.u0.size() != W.d)
        throw Error(ErrorKind::DimensionMismatch, "exponential control dimensions differ from structure");
    ExpFlow F(omega_matrix(W, e.omega));
    EndPoint E;
    E.horizontal = F.integral_minus(2.0 * kPi, e.u0);
    const double rhs = kPi * e.u0.squaredNorm() - 0.5 * e.u0.dot(E.horizontal);
    for (int n = opt.min_intervals; n <= opt.max_intervals; n *= 2) {
        auto L = l_matrices(W, e.omega, n);
        E.vertical = Vec(W.l);
        for (int i = 0; i < W.l; ++i) E.vertical(i) = e.u0.dot(L[i] * e.u0);
        double lhs = e.omega.dot(E.vertical);
        if (std::abs(lhs - rhs) <= opt.check_tol * std::max(1.0, std::abs(rhs))) return E;
    }
    throw Error(ErrorKind::ConsistencyFailure, "omega-component check failed at the finest quadrature");
}

namespace {

Vec pack(const ExponentialControl& e) {
    Vec z(e.omega.size() + e.u0.size());
    z << e.omega, e.u0;
    return z;
}

ExponentialControl unpack(const Vec& z, int l, int d) { return {z.head(l), z.tail(d)}; }

}  // namespace

ExponentialControl solve_endpoint(const CarnotStructure& W, const EndPoint& target, const ExponentialControl& init,
                                  double tol, const SolveOptions& opt) {
    if (!(tol > 0)) throw Error(ErrorKind::Precondition, "tol must be positive");
    if (target.horizontal.size() != W.d || target.vertical.size() != W.l || init.omega.size() != W.l ||
        init.u0.size() != W.d)
        throw Error(ErrorKind::DimensionMismatch, "target or initial guess has wrong dimensions");
    const int l = W.l, d = W.d, n = l + d;
    Vec tgt(n);
    tgt << target.horizontal, target.vertical;
    auto residual = [&](const Vec& z) -> Vec {
        try {
            EndPoint E = shoot(W, unpack(z, l, d));
            Vec r(n);
            r << E.horizontal, E.vertical;
            return r - tgt;
        } catch (const Error&) {
            return Vec::Constant(n, std::numeric_limits<double>::infinity());
        }
    };
    Vec z = pack(init);
    Vec r = residual(z);
    for (int it = 0; it < opt.max_iter; ++it) {
        double rn = r.norm();
        if (rn < tol) return unpack(z, l, d);
        if (!std::isfinite(rn)) break;
        Mat Jm(n, n);
        for (int j = 0; j < n; ++j) {
            double h = opt.fd_step * std::max(1.0, std::abs(z(j)));
            Vec zp = z, zm = z;
            zp(j) += h;
            zm(j) -= h;
            Jm.col(j) = (residual(zp) - residual(zm)) / (2.0 * h);
        }
        if (!Jm.allFinite()) break;
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(Jm);
        cod.setThreshold(1e-10);
        Vec step = -cod.solve(r);
        double lam = 1.0;
        Vec zn = z + step, rnew = residual(zn);
        while (!(rnew.norm() < rn) && lam > 1e-6) {
            lam *= 0.5;
            zn = z + lam * step;
            rnew = residual(zn);
        }
        z = zn;
        r = rnew;
    }
    if (r.allFinite() && r.norm() < tol) return unpack(z, l, d);
    throw Error(ErrorKind::NoConvergence, "damped Newton did not reach the tolerance");
}

std::vector<ExponentialControl> solve_endpoint_multistart(const CarnotStructure& W, const EndPoint& target,
                                                          const std::vector<ExponentialControl>& inits,
                                                          double tol, const SolveOptions& opt) {
    std::vector<ExponentialControl> sols;
    for (const auto& init : inits) {
        try {
            ExponentialControl s = solve_endpoint(W, target, init, tol, opt);
            bool dup = false;
            for (const auto& o : sols)
                if ((pack(o) - pack(s)).norm() < 1e-6) dup = true;
            if (!dup) sols.push_back(s);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NoConvergence) throw;
        }
    }
    return sols;
}

Mat omega_q_operator(const CarnotStructure& W, const Vec& omega, int L) {
    const int d = W.d;
    const Mat M = omega_matrix(W, omega);
    Mat K = Mat::Zero(2 * d * L, 2 * d * L);
    for (int k = 1; k <= L; ++k) {
        int o = 2 * d * (k - 1);
        K.block(o, o + d, d, d) = M / k;
        K.block(o + d, o, d, d) = -M / k;
    }
    return K;
}

Mat vertical_gram(const CarnotStructure& W, int i, int L) {
    const int d = W.d;
    Mat G = Mat::Zero(2 * d * L, 2 * d * L);
    for (int k = 1; k <= L; ++k) {
        int o = 2 * d * (k - 1);
        G.block(o, o + d, d, d) = W.matrices[i] / (2.0 * k);
        G.block(o + d, o, d, d) = -W.matrices[i] / (2.0 * k);
    }
    return G;
}

}  // namespace carnot
