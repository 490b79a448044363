#pragma once
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lowlying/characters.hpp"
#include "lowlying/curve.hpp"

namespace lowlying {

// L-series coefficients a_1..a_cap of the curve (integral normalization),
// via the degree-2 Euler product: a_{p^(k+1)} = a_p a_{p^k} - p a_{p^(k-1)}
// at good p, a_{p^k} = a_p^k at multiplicative p, 0 at additive p.
std::vector<double> hecke_coefficients(const EllipticCurve& E, std::size_t cap,
                                       const LocalProvider& provider = nullptr);

// Completed function Lambda(s) = (sqrt(N)/2pi)^(s+1/2) Gamma(s+1/2) L(s+1/2, E x chi)
// in the normalization with central point s = 1/2, N = q^2 Q_E.
struct CompletedLSeries {
    std::vector<std::complex<double>> coefficients;  // index n: a_f(n) chi(n), [0] unused
    double conductor = 0.0;                          // q^2 * Q_E
    std::complex<double> root_number = {0.0, 0.0};   // set by root_number_numeric
    bool dual_flag = true;                           // chi = conj(chi)
    int64_t twist_conductor = 1;                     // q
};

CompletedLSeries build_completed(const EllipticCurve& E, const DirichletCharacter* chi,
                                 std::size_t coefficient_cap,
                                 const LocalProvider& provider = nullptr);

// G_k(x) = integral_1^inf e^(-x t) log^k(t) dt for k = 0..6;
// series below the crossover, Gauss-Legendre panels above it
std::array<double, 7> smoothing_kernels(double x);

// scale-A variant integral_A^inf e^(-x t) log^k(t) dt
std::array<double, 7> smoothing_kernels_scaled(double x, double A);

// E1(x) = integral_x^inf e^(-t)/t dt
double exp_integral_e1(double x);

// k-th central derivative of the completed function, via the two-sided
// smoothed sum at smoothing scale A (root_number must be set unless dual
// computation is bypassed by uses that only need the direct sum).
std::complex<double> smoothed_value(const CompletedLSeries& L, int k, double A = 1.0);

// solve the A-independence of the k=0 smoothed sum for the root number;
// tries the scale pairs (1, 1.25), (1, 1.5), (1, 2)
std::complex<double> root_number_numeric(const CompletedLSeries& L);

struct RankEstimate {
    int order = 0;
    std::complex<double> leading_coefficient = {0.0, 0.0};
    double certified_margin = 0.0;  // |value|/scale - threshold at the reported order
};

// smallest k <= 6 whose central derivative exceeds threshold * scale_k,
// scale_k = 2 sum |a_f(n) chi(n)| sqrt(n) G_k(x_n)
RankEstimate analytic_rank(const CompletedLSeries& L, double threshold = 1e-3);

struct TwistRankRow {
    int64_t conductor = 0;
    std::size_t char_index = 0;  // position in family order
    std::string descriptor;
    int order = 0;
    double margin = 0.0;
    std::complex<double> omega = {0.0, 0.0};
    bool overflow = false;
};

struct FieldRankRow {
    int64_t conductor = 0;
    double weight = 0.0;
    int field_rank = 0;  // r_Q + sum of twist orders over the Galois orbit
    bool overflow = false;
};

struct FamilyRankSummary {
    std::vector<TwistRankRow> twists;
    std::vector<FieldRankRow> fields;
    double weighted_average_rank = 0.0;  // over fields, excluding overflow rows
    double vanishing_proportion = 0.0;   // twists with order >= 1
    int overflow_count = 0;
};

// rank statistics over the order-l family with conductor weight w(q/X);
// per-field ranks combine the r_Q baseline with every character of the
// field's cyclic group (Galois orbits of the emitted conjugate pairs)
FamilyRankSummary family_rank_statistics(const EllipticCurve& E, int l, double X,
                                         const WeightFunction& weight,
                                         const LocalProvider& provider = nullptr,
                                         unsigned threads = 1,
                                         double threshold = 1e-3);

// classical single-kernel cross-checks, valid under the stated root number:
// L(E,1) when omega = +1, L'(E,1) when omega = -1
double l_value_series(const EllipticCurve& E, std::size_t cap,
                      const LocalProvider& provider = nullptr);
double l_prime_series(const EllipticCurve& E, std::size_t cap,
                      const LocalProvider& provider = nullptr);

} // namespace lowlying
