#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "lowlying/characters.hpp"
#include "lowlying/curve.hpp"
#include "lowlying/fejer.hpp"

namespace lowlying {

// One-level density through the prime side of the explicit formula, with the
// gamma-factor integral and prime powers >= 3 dropped; error_budget records
// the absolute C/log L allowance for those terms.
struct DensityReport {
    double conductor_term = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double total = 0.0;          // conductor_term + s1 + s2, by construction
    double predicted = 0.0;
    double family_size = 0.0;    // weighted
    double L_param = 0.0;        // L = X^2
    double error_budget = 0.0;
    std::string symmetry;        // "U" (unitary) or "O" (orthogonal) prediction
};

inline constexpr double kErrorBudgetC = 2.0;

// D(f x chi, phi) for a single twist. L = X^2; prime cutoffs L^sigma and
// L^(sigma/2); chi and conjugate contributions folded into 2 Re.
// Throws ConductorClash when gcd(q_chi, Q_E) > 1.
DensityReport one_level_density_twist(const EllipticCurve& E, const DirichletCharacter& chi,
                                      double X, const TestFunction& phi,
                                      const LocalProvider& provider = nullptr);

// Weighted family average over all order-l twists; predicted = phi_hat(0).
// Throws EmptyFamily when no character carries positive weight.
DensityReport family_average_cyclic(const EllipticCurve& E, int l, double X,
                                    const TestFunction& phi, const WeightFunction& weight,
                                    const LocalProvider& provider = nullptr,
                                    unsigned threads = 1);

// (sum_i w_i r_i) phi(0) <= (sum_i w_i) * density_average + tol
bool rank_inequality_check(const std::vector<int>& ranks, const std::vector<double>& weights,
                           double density_average, const TestFunction& phi,
                           double tol = 1e-9);

} // namespace lowlying
