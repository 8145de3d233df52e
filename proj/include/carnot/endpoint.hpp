#pragma once

#include <vector>

#include "carnot/structure.hpp"

namespace carnot {

// u(t) = mean/sqrt(2 pi) + sum_k U_k cos(kt)/sqrt(pi) + V_k sin(kt)/sqrt(pi) on [0, 2 pi].
// All coefficients are taken against the orthonormal trigonometric basis,
// so the L2 norm of u is the Euclidean norm of the coefficient list.
struct Control {
    int L = 0;
    Vec mean;
    std::vector<Vec> U, V;  // index k-1 holds wave number k

    static Control zero(int d, int L);
    int d() const { return static_cast<int>(mean.size()); }
    bool zero_mean() const { return mean.isZero(0.0); }
    Vec eval(double t) const;
    Control scaled(double c) const;
};

// Stacked coefficients [U_1; V_1; ...; U_L; V_L] (mean excluded).
Vec control_to_vector(const Control& u);
Control control_from_vector(const Vec& z, int d);

struct EndPoint {
    Vec horizontal;
    Vec vertical;
};

// u(t) = exp(-t omega A) u0
struct ExponentialControl {
    Vec omega;
    Vec u0;
};

// J = |u|^2 / 2
double energy(const Control& u);

// Closed form per wave number for zero-mean controls, Gauss-Legendre on the
// explicit formula otherwise.
EndPoint endpoint_quadratic(const CarnotStructure& W, const Control& u);

// RK4 on x' = u, y_i' = x^T A_i u / 2 over [0, 2 pi]. steps >= 64.
EndPoint endpoint_ode(const CarnotStructure& W, const Control& u, int steps);

struct TrajectorySample {
    double t;
    Vec x, y;
};
std::vector<TrajectorySample> trajectory(const CarnotStructure& W, const Control& u, int steps);

struct Projection {
    Control control;
    double tail_mass = 0.0;  // L2 mass of u outside T^0..T^L
    bool exact = false;      // u0 periodic: every active plane resonant
};

// Fourier coefficients of exp(-t omega A) u0 up to wave number L.
Projection project_exponential(const CarnotStructure& W, const ExponentialControl& e, int L);

// Per-plane closed forms for exp(-t M) and its integrals, built once per M.
class ExpFlow {
public:
    explicit ExpFlow(const Mat& M);
    const SkewSpectrum& spectrum() const { return S_; }
    Vec apply(double t, const Vec& v) const;          // exp(-tM) v
    Mat exp_minus(double t) const;                    // exp(-tM)
    Mat integral_plus(double t) const;                // int_0^t exp(sM) ds
    Vec integral_minus(double t, const Vec& v) const; // int_0^t exp(-sM) v ds

private:
    Mat M_;
    SkewSpectrum S_;
};

// L_i(omega) = 1/2 int_0^{2pi} (int_0^t exp(s omega A) ds) A_i exp(-t omega A) dt
// by composite Simpson on `intervals` (even) subintervals.
std::vector<Mat> l_matrices(const CarnotStructure& W, const Vec& omega, int intervals);

struct ShootOptions {
    int min_intervals = 2048;
    int max_intervals = 1 << 17;
    double check_tol = 1e-7;
};

// Endpoint of exp(-t omega A) u0. Throws ConsistencyFailure when the
// omega-component check cannot be met by refining the quadrature.
EndPoint shoot(const CarnotStructure& W, const ExponentialControl& e, const ShootOptions& opt = {});

struct SolveOptions {
    int max_iter = 200;
    double fd_step = 1e-6;
};

ExponentialControl solve_endpoint(const CarnotStructure& W, const EndPoint& target,
                                  const ExponentialControl& init, double tol, const SolveOptions& opt = {});

// Runs solve_endpoint from each start, drops failures, dedups at 1e-6.
std::vector<ExponentialControl> solve_endpoint_multistart(const CarnotStructure& W, const EndPoint& target,
                                                          const std::vector<ExponentialControl>& inits,
                                                          double tol, const SolveOptions& opt = {});

// Gradient operator K of omega.q on T_1 + ... + T_L in the stacked basis:
// block k is (1/k) [[0, omega A], [-omega A, 0]]; d(omega.q)_u = K u.
Mat omega_q_operator(const CarnotStructure& W, const Vec& omega, int L);

// Gram matrix of the quadratic form q_i on T_1 + ... + T_L (q_i(u) = u^T G u).
Mat vertical_gram(const CarnotStructure& W, int i, int L);

}  // namespace carnot
