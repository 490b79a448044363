#pragma once
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace lowlying {

enum class Reduction { Good, SplitMultiplicative, NonsplitMultiplicative, Additive };

std::string reduction_name(Reduction r);
Reduction reduction_from_name(const std::string& s);

struct LocalData {
    int64_t p = 0;
    Reduction reduction = Reduction::Good;
    int64_t a_p = 0;   // trace of Frobenius for good p; 1/-1/0 for bad p
};

class EllipticCurve {
public:
    // Validates the model: nonzero discriminant, conductor support inside the
    // discriminant support, minimality at p >= 5. Throws ConfigError or
    // NonminimalModel.
    EllipticCurve(int64_t a1, int64_t a2, int64_t a3, int64_t a4, int64_t a6,
                  int64_t conductor, std::optional<int> known_rank = std::nullopt);

    int64_t a1() const { return a1_; }
    int64_t a2() const { return a2_; }
    int64_t a3() const { return a3_; }
    int64_t a4() const { return a4_; }
    int64_t a6() const { return a6_; }
    int64_t conductor() const { return conductor_; }
    std::optional<int> known_rank() const { return known_rank_; }

    int64_t discriminant() const { return disc_; }
    int64_t c4() const { return c4_; }
    int64_t c6() const { return c6_; }
    int64_t b2() const { return b2_; }

    // hash of (a1..a6, conductor), used as the cache fingerprint
    uint64_t fingerprint() const;

private:
    int64_t a1_, a2_, a3_, a4_, a6_, conductor_;
    std::optional<int> known_rank_;
    int64_t b2_, b4_, b6_, b8_, c4_, c6_, disc_;
};

// #E(F_p) including infinity. Throws BadReduction if p | discriminant.
int64_t count_points(const EllipticCurve& E, int64_t p);

LocalData reduction_type(const EllipticCurve& E, int64_t p);

// Satake-normalized coefficients: |a_f(p)| <= 2.
double a_f(const LocalData& d);
double a_f_sq(const LocalData& d);
double a_f(const EllipticCurve& E, int64_t p);
double a_f_sq(const EllipticCurve& E, int64_t p);

// Supplies LocalData per prime; lets callers route through the on-disk cache.
using LocalProvider = std::function<LocalData(int64_t p)>;

// theta(x) = sum over p <= x of a_f(p^2) log p; expected near -x.
// Sums in increasing-p order regardless of provider, so output is
// reproducible. `provider` may be null (direct computation).
double theta_f(const EllipticCurve& E, double x, const LocalProvider& provider = nullptr);

} // namespace lowlying
