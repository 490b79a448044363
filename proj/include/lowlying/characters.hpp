#pragma once
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace lowlying {

// ----- family weights -----

enum class WeightKind { SmoothBump, Sharp };

struct WeightFunction {
    WeightKind kind = WeightKind::SmoothBump;
    // SmoothBump: exp(-1/(1-4(t-1)^2)) on |t-1| < 1/2, 0 outside.
    // Sharp: indicator of (0,1].
    double operator()(double t) const;
    // conductors beyond support_factor()*X get weight zero
    double support_factor() const { return kind == WeightKind::SmoothBump ? 1.5 : 1.0; }
};

WeightKind weight_from_name(const std::string& s);
std::string weight_name(WeightKind k);

// ----- characters of prime order l -----

/// One prime-power factor of the conductor: a prime q = 1 (mod l), or l^2.
// chi(g^a) = zeta_l^(exponent_unit * a) on units, 0 elsewhere.
struct LocalCharacter {
    int64_t modulus = 0;
    int64_t generator = 0;
    int exponent_unit = 0;   // in 1..l-1
    std::shared_ptr<const std::vector<int32_t>> dlog;  // -1 at non-units
};

class DirichletCharacter {
public:
    DirichletCharacter(int l, std::vector<LocalCharacter> locals);

    int order() const { return l_; }
    int64_t conductor() const { return conductor_; }
    const std::vector<LocalCharacter>& locals() const { return locals_; }

    // exponent e with chi(n) = zeta_l^e, or -1 when gcd(n, conductor) > 1
    int exp_at(int64_t n) const;
    std::complex<double> value(int64_t n) const;

    DirichletCharacter conjugate() const;

    // "m1:g1:j1;m2:g2:j2;..." over moduli in increasing order
    std::string local_descriptor() const;

private:
    int l_;
    int64_t conductor_;
    std::vector<LocalCharacter> locals_;  // sorted by modulus
};

// zeta_l^k for k in 0..l-1
std::vector<std::complex<double>> roots_of_unity(int l);

// true iff q = l^b * m, b in {0,2}, m squarefree with every prime = 1 (mod l),
// gcd(q, Q_E) = 1, q > 1
bool is_valid_conductor(int64_t q, int l, int64_t Q_E);

// All valid conductors up to and including `bound`, ascending.
std::vector<int64_t> valid_conductors(int l, int64_t bound, int64_t Q_E);

// Every primitive order-l character with conductor <= support_factor*X.
// Per conductor there are (l-1)^omega(q) characters, emitted as conjugate
// pairs ordered by the lexicographic exponent tuple over sorted moduli.
// Throws FamilyTooLarge when the family would exceed `size_cap`.
std::vector<DirichletCharacter> enumerate_family(int l, double X, int64_t Q_E,
                                                 const WeightFunction& weight,
                                                 std::size_t size_cap = 4'000'000);

double weighted_count(int l, double X, int64_t Q_E, const WeightFunction& weight);

// sum of w(q/X) log q over the family
double conductor_log_sum(int l, double X, int64_t Q_E, const WeightFunction& weight);

// sum of w(q/X) chi(n) over the family
std::complex<double> family_char_sum(int l, double X, int64_t Q_E,
                                     const WeightFunction& weight, int64_t n);

} // namespace lowlying
