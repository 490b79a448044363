#pragma once
#include <memory>

namespace lowlying {

// Even test function with compactly supported Fourier transform.
// Convention: phi_hat(u) = integral of phi(x) e^{-2 pi i u x} dx.
struct TestFunction {
    virtual ~TestFunction() = default;
    virtual double sigma() const = 0;    // support radius of phi_hat
    virtual double phi(double x) const = 0;
    virtual double phi_hat(double u) const = 0;
    virtual double phi0() const = 0;
    virtual double phihat0() const = 0;
};

// Fejer kernel pair:
//   phi(x)     = sin^2(pi sigma x) / (2 pi x)^2,  phi(0) = sigma^2/4
//   phi_hat(u) = (sigma - |u|)/4 on |u| <= sigma, 0 outside
class FejerPair final : public TestFunction {
public:
    explicit FejerPair(double sigma);
    double sigma() const override { return sigma_; }
    double phi(double x) const override;
    double phi_hat(double u) const override;
    double phi0() const override { return sigma_ * sigma_ / 4.0; }
    double phihat0() const override { return sigma_ / 4.0; }

private:
    double sigma_;
};

// phi_hat(0)/phi(0); 1/sigma for the Fejer pair. The reported average-rank
// bound is this value plus the base-field rank.
double rank_bound_cyclic(const TestFunction& phi);

// (phi_hat(0) + phi(0)/2)/phi(0) = 1/sigma + 1/2 for Fejer.
double rank_bound_sd(const TestFunction& phi);

} // namespace lowlying
