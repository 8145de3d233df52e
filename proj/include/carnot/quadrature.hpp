#pragma once

#include <functional>
#include <vector>

namespace carnot {

// Golub-Welsch nodes/weights on [-1, 1].
struct GaussRule {
    std::vector<double> x, w;
};
GaussRule gauss_legendre(int n);

// Composite Gauss-Legendre with `panels` equal panels of `order` nodes.
double integrate_gl(const std::function<double(double)>& f, double a, double b, int panels, int order = 8);

struct AdaptiveResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
    int evaluations = 0;
};

// Adaptive Gauss-Kronrod 7/15 by interval bisection. Stops when the summed
// error estimate is below max(abs_tol, rel_tol*|I|) or max_intervals is hit.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, double rel_tol = 0.0, int max_intervals = 4000);

}  // namespace carnot
