#include "lowlying/curve.hpp"

#include <cmath>
#include <vector>

#include "lowlying/errors.hpp"
#include "lowlying/format.hpp"
#include "lowlying/primes.hpp"

namespace lowlying {

namespace {

int64_t checked_i64(__int128 v, const char* what) {
    if (v > INT64_MAX || v < INT64_MIN)
        throw ConfigError(std::string(what) + " overflows 64 bits");
    return static_cast<int64_t>(v);
}

int vp(int64_t n, int64_t p) {
    int v = 0;
    while (n != 0 && n % p == 0) { n /= p; ++v; }
    return v;
}

int64_t mod_pos(int64_t a, int64_t p) {
    int64_t r = a % p;
    return r < 0 ? r + p : r;
}

bool is_qr(int64_t a, int64_t p) {
    // p odd prime, a not divisible by p
    return pow_mod(a, static_cast<uint64_t>((p - 1) / 2), p) == 1;
}

} // namespace

std::string reduction_name(Reduction r) {
    switch (r) {
        case Reduction::Good: return "good";
        case Reduction::SplitMultiplicative: return "split";
        case Reduction::NonsplitMultiplicative: return "nonsplit";
        case Reduction::Additive: return "additive";
    }
    throw Error("unreachable reduction kind");
}

Reduction reduction_from_name(const std::string& s) {
    if (s == "good") return Reduction::Good;
    if (s == "split") return Reduction::SplitMultiplicative;
    if (s == "nonsplit") return Reduction::NonsplitMultiplicative;
    if (s == "additive") return Reduction::Additive;
    throw CacheCorruption("unknown reduction kind: " + s);
}

EllipticCurve::EllipticCurve(int64_t a1, int64_t a2, int64_t a3, int64_t a4, int64_t a6,
                             int64_t conductor, std::optional<int> known_rank)
    : a1_(a1), a2_(a2), a3_(a3), a4_(a4), a6_(a6),
      conductor_(conductor), known_rank_(known_rank) {
    if (conductor <= 0) throw ConfigError("conductor must be positive");
    if (known_rank && *known_rank < 0) throw ConfigError("known_rank must be nonnegative");

    __int128 A1 = a1, A2 = a2, A3 = a3, A4 = a4, A6 = a6;
    __int128 b2 = A1 * A1 + 4 * A2;
    __int128 b4 = 2 * A4 + A1 * A3;
    __int128 b6 = A3 * A3 + 4 * A6;
    __int128 b8 = A1 * A1 * A6 + 4 * A2 * A6 - A1 * A3 * A4 + A2 * A3 * A3 - A4 * A4;
    __int128 c4 = b2 * b2 - 24 * b4;
    __int128 c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
    __int128 disc = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;

    b2_ = checked_i64(b2, "b2");
    b4_ = checked_i64(b4, "b4");
    b6_ = checked_i64(b6, "b6");
    b8_ = checked_i64(b8, "b8");
    c4_ = checked_i64(c4, "c4");
    c6_ = checked_i64(c6, "c6");
    disc_ = checked_i64(disc, "discriminant");

    if (disc_ == 0) throw ConfigError("singular model: discriminant is zero");

    for (auto [p, e] : factorize(conductor_)) {
        (void)e;
        if (disc_ % p != 0)
            throw ConfigError("conductor prime " + std::to_string(p) +
                              " does not divide the discriminant");
    }

    // v_p(c4) >= 4 and v_p(disc) >= 12 admits the u=p rescaling; only primes
    // with p^12 <= |disc| can trip this
    for (int64_t p : primes_up_to(static_cast<int64_t>(
             std::pow(std::abs(static_cast<double>(disc_)), 1.0 / 12) + 2))) {
        if (p < 5 || disc_ % p != 0) continue;
        if (vp(c4_, p) >= 4 && vp(disc_, p) >= 12)
            throw NonminimalModel("model is not minimal at p=" + std::to_string(p));
    }
}

uint64_t EllipticCurve::fingerprint() const {
    std::string key;
    for (int64_t v : {a1_, a2_, a3_, a4_, a6_, conductor_})
        key += std::to_string(v) + ";";
    return fnv1a64(key);
}

namespace {

// direct enumeration of the long model over F_p
int64_t count_points_long(const EllipticCurve& E, int64_t p) {
    int64_t n = 1; // infinity
    for (int64_t x = 0; x < p; ++x)
        for (int64_t y = 0; y < p; ++y) {
            __int128 lhs = (__int128)y * y + (__int128)E.a1() * x * y + (__int128)E.a3() * y;
            __int128 rhs = ((__int128)x * x * x + (__int128)E.a2() * x * x +
                            (__int128)E.a4() * x + E.a6());
            if ((lhs - rhs) % p == 0) ++n;
        }
    return n;
}

} // namespace

int64_t count_points(const EllipticCurve& E, int64_t p) {
    if (E.discriminant() % p == 0)
        throw BadReduction("p=" + std::to_string(p) + " divides the discriminant");
    if (p < 5) return count_points_long(E, p);

    // y^2 = x^3 - 27 c4 x - 54 c6, isomorphic over F_p once 6 is invertible
    uint64_t up = static_cast<uint64_t>(p);
    uint64_t A = static_cast<uint64_t>(mod_pos(-27 * (__int128)E.c4() % p, p));
    uint64_t B = static_cast<uint64_t>(mod_pos(-54 * (__int128)E.c6() % p, p));

    // bitset keeps the table small enough to stay cache resident
    std::vector<uint64_t> qr(static_cast<size_t>(up / 64 + 1), 0);
    uint64_t sq = 0;  // a^2 mod p stepped by (a+1)^2 - a^2 = 2a+1
    for (uint64_t a = 0; a <= up / 2; ++a) {
        qr[static_cast<size_t>(sq >> 6)] |= uint64_t{1} << (sq & 63);
        sq += 2 * a + 1;
        while (sq >= up) sq -= up;
    }

    // f(x) = x^3 + Ax + B stepped by finite differences:
    // d1(x) = f(x+1)-f(x) = 3x^2+3x+1+A, d2(x) = d1(x+1)-d1(x) = 6x+6
    uint64_t d0 = B % up;
    uint64_t d1 = (1 + A) % up;
    uint64_t d2 = 6 % up;
    int64_t n = 1;
    for (uint64_t x = 0; x < up; ++x) {
        if (d0 == 0) n += 1;
        else if ((qr[static_cast<size_t>(d0 >> 6)] >> (d0 & 63)) & 1) n += 2;
        d0 += d1; if (d0 >= up) d0 -= up;
        d1 += d2; if (d1 >= up) d1 -= up;
        d2 += 6;  if (d2 >= up) d2 -= up;
    }
    return n;
}

LocalData reduction_type(const EllipticCurve& E, int64_t p) {
    LocalData d;
    d.p = p;
    if (E.discriminant() % p != 0) {
        d.reduction = Reduction::Good;
        d.a_p = p + 1 - count_points(E, p);
        return d;
    }
    if (E.c4() % p != 0) {
        bool split;
        if (p >= 3) {
            split = is_qr(mod_pos(-(__int128)E.c6() % p, p), p);
        } else {
            // nonsingular F_2 points incl. infinity: 1 on the split curve
            // (two rational tangents gone), 3 on the nonsplit one
            int64_t n = 1;
            for (int64_t x = 0; x < 2; ++x)
                for (int64_t y = 0; y < 2; ++y) {
                    int64_t f = y * y + E.a1() * x * y + E.a3() * y -
                                (x * x * x + E.a2() * x * x + E.a4() * x + E.a6());
                    if (mod_pos(f, 2) != 0) continue;
                    int64_t fy = E.a1() * x + E.a3();          // 2y drops mod 2
                    int64_t fx = E.a1() * y - (3 * x * x + 2 * E.a2() * x + E.a4());
                    if (mod_pos(fy, 2) == 0 && mod_pos(fx, 2) == 0) continue;
                    ++n;
                }
            split = (n == 1);
        }
        d.reduction = split ? Reduction::SplitMultiplicative : Reduction::NonsplitMultiplicative;
        d.a_p = split ? 1 : -1;
    } else {
        d.reduction = Reduction::Additive;
        d.a_p = 0;
    }
    return d;
}

double a_f(const LocalData& d) {
    switch (d.reduction) {
        case Reduction::Good:
        case Reduction::SplitMultiplicative:
        case Reduction::NonsplitMultiplicative:
            return static_cast<double>(d.a_p) / std::sqrt(static_cast<double>(d.p));
        case Reduction::Additive:
            return 0.0;
    }
    throw Error("unreachable reduction kind");
}

double a_f_sq(const LocalData& d) {
    switch (d.reduction) {
        case Reduction::Good: {
            double v = a_f(d);
            return v * v - 2.0;   // alpha*conj(alpha) = 1
        }
        case Reduction::SplitMultiplicative:
        case Reduction::NonsplitMultiplicative:
            return static_cast<double>(d.a_p * d.a_p) / static_cast<double>(d.p);
        case Reduction::Additive:
            return 0.0;
    }
    throw Error("unreachable reduction kind");
}

double a_f(const EllipticCurve& E, int64_t p) { return a_f(reduction_type(E, p)); }
double a_f_sq(const EllipticCurve& E, int64_t p) { return a_f_sq(reduction_type(E, p)); }

double theta_f(const EllipticCurve& E, double x, const LocalProvider& provider) {
    if (x < 2) throw ConfigError("theta_f: x must be >= 2");
    double sum = 0.0;
    for (int64_t p : primes_up_to(static_cast<int64_t>(x))) {
        LocalData d = provider ? provider(p) : reduction_type(E, p);
        sum += a_f_sq(d) * std::log(static_cast<double>(p));
    }
    return sum;
}

} // namespace lowlying
