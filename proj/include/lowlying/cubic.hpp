#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lowlying/density.hpp"

namespace lowlying {

enum class Signature { TotallyReal, Complex };

enum class SplitKind { C1, C12, C123, PartialRam, TotalRam };

std::string split_kind_name(SplitKind k);

struct CubicField {
    // defining polynomial x^3 + a x^2 + b x + c (first hit in scan order;
    // different search boxes may pick a different generator of the same field)
    int64_t a = 0, b = 0, c = 0;
    int64_t disc_field = 0;   // D_F
    int64_t index_sq = 1;     // disc(poly) = index_sq * D_F
    Signature signature = Signature::Complex;
    // (p, roots of poly mod p) at the first primes not dividing disc(poly);
    // equal fields agree at every common entry
    std::vector<std::pair<int64_t, int>> fingerprint;
};

struct SplittingDatum {
    int64_t p = 0;
    SplitKind kind = SplitKind::C123;
    double a_rho_p = 0.0;
    double a_rho_p2 = 0.0;
};

// disc(x^3 + a x^2 + b x + c)
int64_t cubic_poly_disc(int64_t a, int64_t b, int64_t c);

// (D_F, index_sq) for the field defined by an irreducible x^3+ax^2+bx+c,
// via p-maximalization of Z[theta] at every prime whose square divides the
// polynomial discriminant.
std::pair<int64_t, int64_t> cubic_field_disc(int64_t a, int64_t b, int64_t c);

// number of roots of x^3+ax^2+bx+c in Z_p (counts distinct p-adic roots;
// the polynomial must be separable)
int zp_root_count(int64_t a, int64_t b, int64_t c, int64_t p);

std::vector<std::pair<int64_t, int>> splitting_fingerprint(int64_t a, int64_t b, int64_t c,
                                                           std::size_t count = 40);

// All S3 cubic fields with |D_F| <= X and gcd(|D_F|, Q_E) = 1, one per
// isomorphism class, ordered by (|D_F|, D_F, fingerprint). Square
// discriminants (cyclic cubics) are excluded. Candidate generators come from
// the Hunter box: trace in {0,1}, T2 <= 1/3 + (2/3) sqrt(X).
std::vector<CubicField> enumerate_cubic_fields(double X, int64_t Q_E,
                                               unsigned threads = 1);

// test-support variant with a widened coefficient box (|a| <= a_abs,
// T2 bound padded by t2_pad); the default box is (1, 0)
std::vector<CubicField> enumerate_cubic_fields_boxed(double X, int64_t Q_E,
                                                     int64_t a_abs, double t2_pad,
                                                     unsigned threads = 1);

SplittingDatum splitting_type(const CubicField& F, int64_t p);

struct LocalDensityRow {
    SplitKind kind;
    int64_t observed = 0;
    double empirical = 0.0;
    double predicted = 0.0;
    double gap = 0.0;
};

struct LocalDensityReport {
    int64_t p = 0;
    double f_p = 0.0;        // 1/p + 1/p^2
    double c1 = 0.0, c2 = 0.0;  // 1/p, 1/p^2
    std::array<LocalDensityRow, 5> rows;
    int64_t known = 0;
    int64_t unknown = 0;
};

LocalDensityReport local_density_report(const std::vector<CubicField>& fields, int64_t p);

// Twist of E by the 2-dimensional Artin representation attached to F.
// conductor_term uses the full twisted conductor D_F^2 * Q_E; prime sums as
// in the cyclic case with a_rho in place of the character values.
DensityReport one_level_density_cubic(const EllipticCurve& E, const CubicField& F,
                                      double X, const TestFunction& phi,
                                      const LocalProvider& provider = nullptr);

// Unweighted average over all fields with |D_F| <= X coprime to Q_E;
// predicted = phi_hat(0) + phi(0)/2.
DensityReport family_average_cubic(const EllipticCurve& E, double X,
                                   const TestFunction& phi,
                                   const LocalProvider& provider = nullptr,
                                   unsigned threads = 1);

} // namespace lowlying
