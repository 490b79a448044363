#include "lowlying/fejer.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lowlying {

FejerPair::FejerPair(double sigma) : sigma_(sigma) {
    if (!(sigma > 0.0) || sigma > 1.0)
        throw std::invalid_argument("FejerPair: sigma must lie in (0,1]");
}

double FejerPair::phi(double x) const {
    constexpr double pi = std::numbers::pi;
    // removable singularity at 0: expand sin^2 to fourth order below the
    // threshold where the quotient loses digits
    double t = pi * sigma_ * x;
    if (std::abs(t) < 1e-4) {
        double t2 = t * t;
        return (sigma_ * sigma_ / 4.0) * (1.0 - t2 / 3.0 + 2.0 * t2 * t2 / 45.0);
    }
    double s = std::sin(t);
    return s * s / (4.0 * pi * pi * x * x);
}

double FejerPair::phi_hat(double u) const {
    double a = std::abs(u);
    if (a > sigma_) return 0.0;
    return (sigma_ - a) / 4.0;
}

double rank_bound_cyclic(const TestFunction& phi) {
    if (!(phi.phi0() > 0.0))
        throw std::invalid_argument("rank_bound_cyclic: phi(0) must be positive");
    return phi.phihat0() / phi.phi0();
}

double rank_bound_sd(const TestFunction& phi) {
    if (!(phi.phi0() > 0.0))
        throw std::invalid_argument("rank_bound_sd: phi(0) must be positive");
    return (phi.phihat0() + phi.phi0() / 2.0) / phi.phi0();
}

} // namespace lowlying
