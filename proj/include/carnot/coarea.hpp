#pragma once

#include <iosfwd>
#include <vector>

#include "carnot/structure.hpp"

namespace carnot {

// lambda_j(theta) = alpha_j(omega(theta)) / |<omega(theta), p>| for a corank-2
// structure, every plane listed twice.
class LambdaCurves {
public:
    LambdaCurves(const CarnotStructure& W, const Vec& p);

    std::vector<double> values(double theta) const;
    // Hellmann-Feynman derivatives in theta, same order and doubling as values()
    std::vector<double> derivatives(double theta) const;
    // sum |lambda_j'| - |sum lambda_j'|, doubled curves included
    double integrand(double theta) const;

    // the two angles where <omega, p> = 0, in [0, 2 pi)
    const std::vector<double>& singular_angles() const { return singular_; }
    // the half circle where <omega, p> > 0
    double half_lo() const { return theta_p_ - kHalfPi; }
    double half_hi() const { return theta_p_ + kHalfPi; }

    // theta, lambda_1..lambda_d, integrand over `samples` points of the open half circle
    void write_csv(std::ostream& os, int samples) const;

    const CarnotStructure& structure() const { return W_; }
    const Vec& target() const { return p_; }

private:
    static constexpr double kHalfPi = 1.5707963267948966;
    CarnotStructure W_;
    Vec p_;
    double theta_p_ = 0.0;
    std::vector<double> singular_;
};

// Half-circle integral of LambdaCurves::integrand.
double tau_numeric(const CarnotStructure& W, const Vec& p, int refine = 1024);

// Eigenvalue vectors v_j of a commuting pair: alpha_j(omega) = |<omega, v_j>|.
struct CommutingData {
    std::vector<Vec> v;         // one per invariant plane, single-counted
    std::vector<double> m;      // det[[p1, v_j1], [p2, v_j2]]
};
// Throws NotCommuting when ||[A1, A2]||_F exceeds 1e-10 (scaled by ||A1|| ||A2|| when larger than 1).
CommutingData commuting_data(const CarnotStructure& W, const Vec& p);

// Closed form for commuting pairs, doubled like tau_numeric.
double tau_commuting(const CarnotStructure& W, const Vec& p);

struct SlopeCheck {
    double slope = 0.0;
    double tau = 0.0;
    double rel_err = 0.0;
    std::vector<double> s;
    std::vector<int> betti;
};
// Least-squares slope of total Betti vs s through the larger half of s_list,
// compared with tau_numeric.
SlopeCheck slope_check(const CarnotStructure& W, const Vec& p, const std::vector<double>& s_list);

}  // namespace carnot
