#include "carnot/coarea.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "carnot/census.hpp"
#include "carnot/quadrature.hpp"
#include "carnot/quadric.hpp"

namespace carnot {

namespace {

const double kPi = std::numbers::pi;

double wrap2pi(double x) {
    x = std::fmod(x, 2 * kPi);
    return x < 0 ? x + 2 * kPi : x;
}

double spread(const std::vector<double>& x) {
    double pos = 0, neg = 0;
    for (double v : x) (v > 0 ? pos : neg) += std::abs(v);
    return 2 * std::min(pos, neg);  // sum |x| - |sum x|
}

double structure_scale(const CarnotStructure& W) {
    double s = 0;
    for (const Mat& A : W.matrices) s = std::max(s, A.norm());
    return s;
}

void require_corank2(const CarnotStructure& W, const Vec& p) {
    if (W.l != 2) throw Error(ErrorKind::Precondition, "corank 2 only");
    if (p.size() != 2) throw Error(ErrorKind::DimensionMismatch, "target length differs from corank");
    if (p.norm() == 0.0) throw Error(ErrorKind::ZeroTarget, "target must be nonzero");
}

}  // namespace

LambdaCurves::LambdaCurves(const CarnotStructure& W, const Vec& p) : W_(W), p_(p) {
    require_corank2(W, p);
    theta_p_ = std::atan2(p(1), p(0));
    singular_ = {wrap2pi(theta_p_ - kHalfPi), wrap2pi(theta_p_ + kHalfPi)};
    std::sort(singular_.begin(), singular_.end());
}

std::vector<double> LambdaCurves::values(double theta) const {
    const Vec w = circle_point(theta);
    const double pd = std::abs(w.dot(p_));
    auto al = skew_alphas(omega_matrix(W_, w));
    std::vector<double> out;
    for (double a : al) out.insert(out.end(), 2, a / pd);
    return out;
}

std::vector<double> LambdaCurves::derivatives(double theta) const {
    const Vec w = circle_point(theta);
    Vec dw(2);
    dw << -std::sin(theta), std::cos(theta);
    const double z = w.dot(p_);
    const double pd = std::abs(z), dpd = (z >= 0 ? 1.0 : -1.0) * dw.dot(p_);
    auto S = skew_spectrum(omega_matrix(W_, w));
    std::vector<double> out(2 * (W_.d / 2), 0.0);
    for (int i = 0; i < static_cast<int>(S.alphas.size()); ++i) {
        const double a = S.alphas[i], da = plane_gradient(W_, S, i).dot(dw);
        out[2 * i] = out[2 * i + 1] = (da * pd - a * dpd) / (pd * pd);
    }
    return out;
}

double LambdaCurves::integrand(double theta) const { return spread(derivatives(theta)); }

void LambdaCurves::write_csv(std::ostream& os, int samples) const {
    if (samples < 1) throw Error(ErrorKind::Precondition, "samples must be positive");
    const int n = 2 * (W_.d / 2);
    os << "theta";
    for (int j = 1; j <= n; ++j) os << ",lambda_" << j;
    os << ",integrand\n";
    char buf[64];
    for (int k = 0; k < samples; ++k) {
        double t = half_lo() + (half_hi() - half_lo()) * (k + 0.5) / samples;
        std::snprintf(buf, sizeof buf, "%.12g", t);
        os << buf;
        for (double v : values(t)) {
            std::snprintf(buf, sizeof buf, ",%.12g", v);
            os << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.12g\n", integrand(t));
        os << buf;
    }
}

double tau_numeric(const CarnotStructure& W, const Vec& p, int refine) {
    require_corank2(W, p);
    if (refine < 512) throw Error(ErrorKind::Precondition, "refine must be at least 512");
    LambdaCurves C(W, p);
    const double scale = structure_scale(W);
    for (double t : C.singular_angles())
        for (double a : skew_alphas(omega_matrix(W, circle_point(t))))
            if (a <= 1e-9 * scale)
                throw Error(ErrorKind::NonGenericTarget, "an eigenvalue curve vanishes where <omega, p> = 0");

    const double clip = 1e-6;
    const double a = C.half_lo() + clip, b = C.half_hi() - clip;
    // near the singular angles every lambda runs to +infinity, so the integrand is 0 there
    for (double t : {a, b})
        if (C.integrand(t) != 0.0)
            throw Error(ErrorKind::ConsistencyFailure, "integrand does not vanish next to a singular angle");

    const int G = refine;
    const int m = W.d / 2;
    std::vector<double> th(G + 1);
    std::vector<std::vector<double>> dl(G + 1), al(G + 1);
#pragma omp parallel for schedule(static)
    for (int k = 0; k <= G; ++k) {
        th[k] = a + (b - a) * k / G;
        dl[k] = C.derivatives(th[k]);
        al[k] = skew_alphas(omega_matrix(W, circle_point(th[k])));
    }

    // kinks: sign changes of a sorted derivative (zeros and crossings) and gap minima
    std::vector<std::vector<double>> found(G);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < G; ++k) {
        for (int i = 0; i < m; ++i) {
            const bool s0 = dl[k][2 * i] > 0, s1 = dl[k + 1][2 * i] > 0;
            if (s0 == s1) continue;
            double x = th[k], y = th[k + 1];
            while (y - x > 1e-13) {
                const double c = 0.5 * (x + y);
                if ((C.derivatives(c)[2 * i] > 0) == s0) x = c;
                else y = c;
            }
            found[k].push_back(0.5 * (x + y));
        }
        if (k == 0) continue;
        for (int i = 0; i + 1 < m; ++i) {
            const double g0 = al[k - 1][i] - al[k - 1][i + 1], g1 = al[k][i] - al[k][i + 1],
                         g2 = al[k + 1][i] - al[k + 1][i + 1];
            if (!(g1 <= g0 && g1 <= g2)) continue;
            auto gap = [&](double t) {
                auto v = skew_alphas(omega_matrix(W, circle_point(t)));
                return v[i] - v[i + 1];
            };
            const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
            double x = th[k - 1], y = th[k + 1];
            double c = y - gr * (y - x), e = x + gr * (y - x), fc = gap(c), fe = gap(e);
            for (int it = 0; it < 90 && y - x > 1e-13; ++it) {
                if (fc < fe) {
                    y = e, e = c, fe = fc, c = y - gr * (y - x), fc = gap(c);
                } else {
                    x = c, c = e, fc = fe, e = x + gr * (y - x), fe = gap(e);
                }
            }
            if (std::min(fc, fe) < 1e-7 * scale) found[k].push_back(0.5 * (x + y));
        }
    }
    std::vector<double> edges = {a};
    for (auto& f : found) edges.insert(edges.end(), f.begin(), f.end());
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(), [](double x, double y) { return y - x <= 1e-12; }),
                edges.end());

    const int P = static_cast<int>(edges.size()) - 1;
    std::vector<AdaptiveResult> piece(P);
    auto f = [&](double t) { return C.integrand(t); };
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < P; ++k) piece[k] = integrate_adaptive(f, edges[k], edges[k + 1], 1e-10, 1e-10);
    double tau = 0, err = 0;
    bool converged = true;
    for (const auto& r : piece) {
        tau += r.value;
        err += r.error;
        converged = converged && r.converged;
    }
    if (!converged && err > 1e-6 * std::max(1.0, tau))
        throw Error(ErrorKind::NoConvergence, "adaptive quadrature missed the 1e-6 tolerance");
    return std::max(0.0, tau);
}

CommutingData commuting_data(const CarnotStructure& W, const Vec& p) {
    require_corank2(W, p);
    const Mat& A1 = W.matrices[0];
    const Mat& A2 = W.matrices[1];
    const double comm = (A1 * A2 - A2 * A1).norm();
    if (comm > 1e-10 * std::max(1.0, A1.norm() * A2.norm()))
        throw Error(ErrorKind::NotCommuting, "[A1, A2] is not zero");

    // a covector with well separated, nonzero alphas fixes the common planes
    const double scale = structure_scale(W);
    double best = -1, best_t = 0;
    for (int k = 0; k < 32; ++k) {
        const double t = 0.1234 + kPi * k / 32;
        auto al = skew_alphas(omega_matrix(W, circle_point(t)));
        double score = al.empty() ? 0 : al.back();
        for (size_t i = 0; i + 1 < al.size(); ++i) {
            const double g = al[i] - al[i + 1];
            if (g > 1e-8 * scale) score = std::min(score, g);
        }
        if (score > best) best = score, best_t = t;
    }
    auto S = skew_spectrum(omega_matrix(W, circle_point(best_t)));
    CommutingData D;
    for (int i = 0; i < static_cast<int>(S.alphas.size()); ++i) {
        Vec v = plane_gradient(W, S, i);
        D.v.push_back(v);
        D.m.push_back(p(0) * v(1) - p(1) * v(0));
    }
    // alpha_j = |<omega, v_j>| on a second covector
    const Vec w1 = circle_point(best_t + 1.0);
    auto al = skew_alphas(omega_matrix(W, w1));
    std::vector<double> pred;
    for (const Vec& v : D.v) pred.push_back(std::abs(w1.dot(v)));
    pred.resize(al.size(), 0.0);
    std::sort(pred.rbegin(), pred.rend());
    for (size_t i = 0; i < al.size(); ++i)
        if (std::abs(pred[i] - al[i]) > 1e-8 * std::max(1.0, scale))
            throw Error(ErrorKind::ConsistencyFailure, "common planes do not reproduce the spectrum");
    return D;
}

double tau_commuting(const CarnotStructure& W, const Vec& p) {
    const CommutingData D = commuting_data(W, p);
    const double tp = std::atan2(p(1), p(0)), lo = tp - kPi / 2, hi = tp + kPi / 2;
    std::vector<double> cuts;
    for (const Vec& v : D.v) {
        if (v.norm() == 0.0) continue;
        const double phi = std::atan2(v(1), v(0)) + kPi / 2;  // <omega, v> = 0 here and at phi + pi
        for (double c : {phi, phi + kPi}) {
            double t = lo + wrap2pi(c - lo);
            if (t > lo && t < hi) cuts.push_back(t);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    double total_abs = 0;
    for (double mj : D.m) total_abs += std::abs(mj);
    const double p2 = p.squaredNorm();
    double tau = 0;
    // the two end pieces carry a zero numerator
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double x = cuts[k], y = cuts[k + 1];
        if (y - x <= 0) continue;
        const Vec w = circle_point(0.5 * (x + y));
        double signed_sum = 0;
        for (size_t j = 0; j < D.v.size(); ++j) signed_sum += (w.dot(D.v[j]) > 0 ? 1.0 : -1.0) * D.m[j];
        const double num = total_abs - std::abs(signed_sum);
        tau += num * (std::tan(y - tp) - std::tan(x - tp)) / p2;
    }
    return 2 * tau;
}

SlopeCheck slope_check(const CarnotStructure& W, const Vec& p, const std::vector<double>& s_list) {
    require_corank2(W, p);
    const size_t n = s_list.size();
    if (n < 5) throw Error(ErrorKind::Precondition, "s_list needs at least 5 points");
    for (size_t k = 0; k < n; ++k)
        if (!(s_list[k] > 0) || (k > 0 && !(s_list[k] > s_list[k - 1])))
            throw Error(ErrorKind::Precondition, "s_list must be positive and increasing");
    const double r = s_list[1] / s_list[0];
    for (size_t k = 2; k < n; ++k)
        if (std::abs(s_list[k] / s_list[k - 1] - r) > 1e-6 * r)
            throw Error(ErrorKind::Precondition, "s_list must be geometric");
    const double e1 = base_energy(W, p);
    if (s_list.back() < 100 * e1 * (1 - 1e-12))
        throw Error(ErrorKind::Precondition, "largest s must be at least 100 times the base energy");

    SlopeCheck R;
    R.s = s_list;
    R.betti.resize(n);
    for (size_t k = 0; k < n; ++k) {
        auto P = index_profile_analytic(W, p, s_list[k]);
        if (P.degenerate) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "s = %.12g is a critical energy", s_list[k]);
            throw Error(ErrorKind::Precondition, buf);
        }
        R.betti[k] = betti_from_profile(P).total;
    }
    // least squares with intercept through the larger half
    const size_t first = n / 2;
    double mx = 0, my = 0;
    const double cnt = static_cast<double>(n - first);
    for (size_t k = first; k < n; ++k) mx += s_list[k], my += R.betti[k];
    mx /= cnt;
    my /= cnt;
    double sxy = 0, sxx = 0;
    for (size_t k = first; k < n; ++k) {
        sxy += (s_list[k] - mx) * (R.betti[k] - my);
        sxx += (s_list[k] - mx) * (s_list[k] - mx);
    }
    R.slope = sxy / sxx;
    R.tau = tau_numeric(W, p);
    R.rel_err = R.tau > 0 ? std::abs(R.slope - R.tau) / R.tau : INFINITY;
    return R;
}

}  // namespace carnot
