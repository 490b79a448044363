#include "lowlying/lseries.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "lowlying/errors.hpp"
#include "lowlying/parallel.hpp"
#include "lowlying/primes.hpp"

namespace lowlying {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTailTarget = 50.0;  // truncate sums once the kernel argument passes this
constexpr int kMaxDeriv = 6;

constexpr double kFact[7] = {1, 1, 2, 6, 24, 120, 720};
constexpr double kBinom[7][7] = {
    {1, 0, 0, 0, 0, 0, 0},  {1, 1, 0, 0, 0, 0, 0},   {1, 2, 1, 0, 0, 0, 0},
    {1, 3, 3, 1, 0, 0, 0},  {1, 4, 6, 4, 1, 0, 0},   {1, 5, 10, 10, 5, 1, 0},
    {1, 6, 15, 20, 15, 6, 1}};

// Gamma^(j)(1) from exponentiating log Gamma(1+z) = -gamma z + sum (-1)^m zeta(m) z^m / m
const std::array<double, 7>& gamma_derivs_at_one() {
    static const std::array<double, 7> g = [] {
        const double gamma = 0.5772156649015328606;
        const double zeta[7] = {0, 0, 1.6449340668482264365, 1.2020569031595942854,
                                1.0823232337111381916, 1.0369277551433699263,
                                1.0173430619844491397};
        double c[7] = {0, -gamma, 0, 0, 0, 0, 0};
        for (int m = 2; m <= 6; ++m) c[m] = (m % 2 == 0 ? 1.0 : -1.0) * zeta[m] / m;
        double t[7] = {1, 0, 0, 0, 0, 0, 0};  // Taylor coefficients of Gamma(1+z)
        for (int n = 1; n <= 6; ++n) {
            double s = 0;
            for (int m = 1; m <= n; ++m) s += m * c[m] * t[n - m];
            t[n] = s / n;
        }
        std::array<double, 7> out{};
        for (int j = 0; j <= 6; ++j) out[static_cast<size_t>(j)] = kFact[j] * t[j];
        return out;
    }();
    return g;
}

// 8-point Gauss-Legendre rule on [-1, 1]
constexpr double kGlNode[4] = {0.1834346424956498049, 0.5255324099163289858,
                               0.7966664774136267395, 0.9602898564975362316};
constexpr double kGlWeight[4] = {0.3626837833783619830, 0.3137066458778872873,
                                 0.2223810344533744705, 0.1012285362903762592};

std::array<double, 7> kernels_by_series(double x) {
    const auto& G = gamma_derivs_at_one();
    double mlx = -std::log(x);
    double mlp[8] = {1};
    for (int i = 1; i <= 6; ++i) mlp[i] = mlp[i - 1] * mlx;

    std::array<double, 7> out{};
    for (int k = 0; k <= 6; ++k) {
        double full = 0;
        for (int j = 0; j <= k; ++j) full += kBinom[k][j] * G[static_cast<size_t>(j)] * mlp[k - j];
        out[static_cast<size_t>(k)] = full / x;
    }
    // integral over (0, 1): sum_m (-x)^m/m! * (-1)^k k! / (m+1)^(k+1)
    double low[7] = {0, 0, 0, 0, 0, 0, 0};
    double term = 1.0;
    for (int m = 0; m < 400; ++m) {
        if (m > 0) term *= -x / m;
        double inv = 1.0 / (m + 1);
        double f = inv;
        for (int k = 0; k <= 6; ++k) {
            low[k] += term * f;
            f *= inv;
        }
        if (m > x + 4 && std::abs(term) < 1e-24) break;
    }
    for (int k = 0; k <= 6; ++k) {
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        out[static_cast<size_t>(k)] -= sign * kFact[k] * low[k];
    }
    return out;
}

std::array<double, 7> kernels_by_quadrature(double x) {
    // G_k(x) = (e^-x / x) * int_0^inf e^-v log^k(1 + v/x) dv, panels to v = 60
    std::array<double, 7> acc{};
    for (int panel = 0; panel < 30; ++panel) {
        double mid = 2.0 * panel + 1.0;
        for (int s = -1; s <= 1; s += 2)
            for (int i = 0; i < 4; ++i) {
                double v = mid + s * kGlNode[i];
                double w = kGlWeight[i] * std::exp(-v);
                double lg = std::log1p(v / x);
                double f = w;
                for (int k = 0; k <= 6; ++k) {
                    acc[static_cast<size_t>(k)] += f;
                    f *= lg;
                }
            }
    }
    double pref = std::exp(-x) / x;
    for (auto& a : acc) a *= pref;
    return acc;
}

} // namespace

std::array<double, 7> smoothing_kernels(double x) {
    if (!(x > 0)) throw ConfigError("smoothing kernel argument must be positive");
    if (x > 720.0) return {};
    return x <= 10.0 ? kernels_by_series(x) : kernels_by_quadrature(x);
}

std::array<double, 7> smoothing_kernels_scaled(double x, double A) {
    if (A == 1.0) return smoothing_kernels(x);
    if (!(A > 0)) throw ConfigError("smoothing scale must be positive");
    if (A * x > 720.0) return {};
    auto g = smoothing_kernels(A * x);
    double la = std::log(A);
    double lap[8] = {1};
    for (int i = 1; i <= 6; ++i) lap[i] = lap[i - 1] * la;
    std::array<double, 7> out{};
    for (int k = 0; k <= 6; ++k) {
        double s = 0;
        for (int j = 0; j <= k; ++j) s += kBinom[k][j] * lap[k - j] * g[static_cast<size_t>(j)];
        out[static_cast<size_t>(k)] = A * s;
    }
    return out;
}

double exp_integral_e1(double x) {
    if (!(x > 0)) throw ConfigError("E1 argument must be positive");
    if (x > 720.0) return 0.0;
    if (x <= 1.0) {
        const double gamma = 0.5772156649015328606;
        double s = 0, term = 1;
        for (int k = 1; k <= 40; ++k) {
            term *= -x / k;
            s -= term / k;
            if (std::abs(term) < 1e-22) break;
        }
        return -gamma - std::log(x) + s;
    }
    // continued fraction e^-x / (x+1- 1/(x+3- 4/(x+5- ...))), modified Lentz
    double b = x + 1.0, c = 1e308, d = 1.0 / b, h = d;
    for (int i = 1; i <= 200; ++i) {
        double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x);
}

std::vector<double> hecke_coefficients(const EllipticCurve& E, std::size_t cap,
                                       const LocalProvider& provider) {
    if (cap < 1) throw ConfigError("coefficient cap must be at least 1");
    std::vector<double> a(cap + 1, 0.0);
    a[1] = 1.0;
    std::vector<int32_t> spf(cap + 1, 0);
    for (std::size_t i = 2; i <= cap; ++i) {
        if (spf[i] != 0) continue;
        for (std::size_t j = i; j <= cap; j += i)
            if (spf[j] == 0) spf[j] = static_cast<int32_t>(i);
    }
    std::map<int64_t, LocalData> locals;
    auto local = [&](int64_t p) -> const LocalData& {
        auto it = locals.find(p);
        if (it == locals.end())
            it = locals.emplace(p, provider ? provider(p) : reduction_type(E, p)).first;
        return it->second;
    };
    for (std::size_t n = 2; n <= cap; ++n) {
        auto p = static_cast<std::size_t>(spf[n]);
        std::size_t pe = p, m = n / p;
        while (m % p == 0) { pe *= p; m /= p; }
        if (m > 1) {
            a[n] = a[pe] * a[m];
            continue;
        }
        const LocalData& d = local(static_cast<int64_t>(p));
        if (n == p) {
            a[n] = static_cast<double>(d.a_p);
        } else if (d.reduction == Reduction::Good) {
            a[n] = a[p] * a[n / p] - static_cast<double>(p) * a[n / (p * p)];
        } else if (d.reduction == Reduction::Additive) {
            a[n] = 0.0;
        } else {
            a[n] = a[p] * a[n / p];
        }
    }
    return a;
}

namespace {

std::size_t needed_terms(double N, double min_scale) {
    return static_cast<std::size_t>(
        std::ceil(std::sqrt(N) * kTailTarget / (2.0 * kPi * min_scale)));
}

void require_terms(const CompletedLSeries& L, double min_scale) {
    std::size_t have = L.coefficients.empty() ? 0 : L.coefficients.size() - 1;
    std::size_t need = needed_terms(L.conductor, min_scale);
    if (have < need)
        throw InsufficientCoefficients("have " + std::to_string(have) + " coefficients, need " +
                                       std::to_string(need) + " for conductor " +
                                       std::to_string(L.conductor));
}

// one pass accumulating every quantity the rank estimate needs
struct CentralSums {
    std::array<std::complex<double>, 7> direct{}, mirrored{};  // smoothing scale 1
    std::array<double, 7> scale{};
    std::complex<double> s0_up{}, t0_dn{};  // k = 0 sums at scales 1.25 and 1/1.25
};

CentralSums central_sums(const CompletedLSeries& L) {
    require_terms(L, 0.8);
    CentralSums cs;
    double base = 2.0 * kPi / std::sqrt(L.conductor);
    for (std::size_t n = 1; n < L.coefficients.size(); ++n) {
        std::complex<double> b = L.coefficients[n];
        double x = base * static_cast<double>(n);
        if (0.8 * x > 720.0) break;
        double rn = std::sqrt(static_cast<double>(n));
        auto g = smoothing_kernels(x);
        if (b.real() != 0.0 || b.imag() != 0.0) {
            for (int k = 0; k <= 6; ++k) {
                double kern = rn * g[static_cast<size_t>(k)];
                cs.direct[static_cast<size_t>(k)] += b * kern;
                cs.mirrored[static_cast<size_t>(k)] += std::conj(b) * kern;
                cs.scale[static_cast<size_t>(k)] += std::abs(b) * std::abs(kern);
            }
            cs.s0_up += b * (rn * smoothing_kernels_scaled(x, 1.25)[0]);
            cs.t0_dn += std::conj(b) * (rn * smoothing_kernels_scaled(x, 0.8)[0]);
        }
    }
    return cs;
}

std::complex<double> solve_root_number(const CentralSums& cs) {
    std::complex<double> den = cs.t0_dn - cs.mirrored[0];
    double ref = std::max(cs.scale[0], 1e-300);
    if (std::abs(den) < 1e-10 * ref)
        throw IllConditioned("root number system nearly singular at scale pair (1, 1.25)");
    std::complex<double> omega = (cs.direct[0] - cs.s0_up) / den;
    if (std::abs(std::abs(omega) - 1.0) > 1e-4)
        throw IllConditioned("root number off the unit circle at scale pair (1, 1.25)");
    return omega;
}

RankEstimate rank_from_sums(const CentralSums& cs, std::complex<double> omega,
                            double threshold) {
    for (int k = 0; k <= kMaxDeriv; ++k) {
        double sgn = (k % 2 == 0) ? 1.0 : -1.0;
        std::complex<double> v =
            cs.direct[static_cast<size_t>(k)] + sgn * omega * cs.mirrored[static_cast<size_t>(k)];
        double sc = 2.0 * cs.scale[static_cast<size_t>(k)];
        if (std::abs(v) > threshold * sc)
            return RankEstimate{k, v, sc > 0 ? std::abs(v) / sc - threshold : 0.0};
    }
    throw RankOverflow("no central derivative of order <= 6 clears the threshold");
}

} // namespace

CompletedLSeries build_completed(const EllipticCurve& E, const DirichletCharacter* chi,
                                 std::size_t coefficient_cap, const LocalProvider& provider) {
    int64_t q = chi ? chi->conductor() : 1;
    if (chi && gcd64(q, E.conductor()) != 1)
        throw ConductorClash("twist conductor shares a factor with the curve conductor");
    CompletedLSeries L;
    L.twist_conductor = q;
    L.conductor = static_cast<double>(q) * static_cast<double>(q) *
                  static_cast<double>(E.conductor());
    L.dual_flag = (chi == nullptr);
    auto a = hecke_coefficients(E, coefficient_cap, provider);
    L.coefficients.resize(coefficient_cap + 1);
    for (std::size_t n = 1; n <= coefficient_cap; ++n) {
        double af = a[n] / std::sqrt(static_cast<double>(n));
        L.coefficients[n] = chi ? af * chi->value(static_cast<int64_t>(n))
                                : std::complex<double>(af, 0.0);
    }
    std::size_t have = coefficient_cap;
    if (have >= needed_terms(L.conductor, 0.8)) L.root_number = root_number_numeric(L);
    return L;
}

std::complex<double> smoothed_value(const CompletedLSeries& L, int k, double A) {
    if (k < 0 || k > kMaxDeriv) throw ConfigError("derivative order must be between 0 and 6");
    if (!(A > 0)) throw ConfigError("smoothing scale must be positive");
    require_terms(L, std::min(A, 1.0 / A));
    double base = 2.0 * kPi / std::sqrt(L.conductor);
    std::complex<double> S = 0, T = 0;
    double lo = std::min(A, 1.0 / A);
    for (std::size_t n = 1; n < L.coefficients.size(); ++n) {
        std::complex<double> b = L.coefficients[n];
        double x = base * static_cast<double>(n);
        if (lo * x > 720.0) break;
        if (b.real() == 0.0 && b.imag() == 0.0) continue;
        double rn = std::sqrt(static_cast<double>(n));
        S += b * (rn * smoothing_kernels_scaled(x, A)[static_cast<size_t>(k)]);
        T += std::conj(b) * (rn * smoothing_kernels_scaled(x, 1.0 / A)[static_cast<size_t>(k)]);
    }
    double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    return S + sgn * L.root_number * T;
}

std::complex<double> root_number_numeric(const CompletedLSeries& L) {
    require_terms(L, 0.8);
    const double alt[3] = {1.25, 1.5, 2.0};
    double base = 2.0 * kPi / std::sqrt(L.conductor);
    std::size_t have = L.coefficients.size() - 1;

    auto k0_sum = [&](double A, bool conjugated) {
        std::complex<double> acc = 0;
        for (std::size_t n = 1; n <= have; ++n) {
            std::complex<double> b = L.coefficients[n];
            double x = base * static_cast<double>(n);
            if (A * x > 720.0) break;
            if (b.real() == 0.0 && b.imag() == 0.0) continue;
            double kern = std::sqrt(static_cast<double>(n)) * smoothing_kernels_scaled(x, A)[0];
            acc += (conjugated ? std::conj(b) : b) * kern;
        }
        return acc;
    };

    std::complex<double> s1 = k0_sum(1.0, false);
    std::complex<double> t1 = k0_sum(1.0, true);
    double ref = 0;
    for (std::size_t n = 1; n <= have; ++n) {
        double x = base * static_cast<double>(n);
        if (x > 720.0) break;
        ref += std::abs(L.coefficients[n]) * std::sqrt(static_cast<double>(n)) *
               smoothing_kernels(x)[0];
    }
    ref = std::max(ref, 1e-300);

    std::string last = "no usable smoothing scale pair";
    for (double A2 : alt) {
        if (have < needed_terms(L.conductor, 1.0 / A2)) {
            if (A2 == alt[0])
                throw InsufficientCoefficients(
                    "coefficient supply below the root-number solve requirement");
            break;  // wider pairs need more terms than supplied; stop trying
        }
        std::complex<double> s2 = k0_sum(A2, false);
        std::complex<double> t2 = k0_sum(1.0 / A2, true);
        std::complex<double> den = t2 - t1;
        if (std::abs(den) < 1e-10 * ref) {
            last = "nearly singular system at scale pair (1, " + std::to_string(A2) + ")";
            continue;
        }
        std::complex<double> omega = (s1 - s2) / den;
        if (std::abs(std::abs(omega) - 1.0) > 1e-4) {
            last = "solution off the unit circle at scale pair (1, " + std::to_string(A2) + ")";
            continue;
        }
        return omega;
    }
    throw IllConditioned("root number solve failed: " + last);
}

RankEstimate analytic_rank(const CompletedLSeries& L, double threshold) {
    if (!(threshold > 0)) throw ConfigError("rank threshold must be positive");
    CentralSums cs = central_sums(L);
    std::complex<double> omega = L.root_number;
    if (std::abs(omega) < 0.5) {
        try {
            omega = solve_root_number(cs);
        } catch (const IllConditioned&) {
            omega = root_number_numeric(L);  // wider scale pairs
        }
    }
    return rank_from_sums(cs, omega, threshold);
}

FamilyRankSummary family_rank_statistics(const EllipticCurve& E, int l, double X,
                                         const WeightFunction& weight,
                                         const LocalProvider& provider, unsigned threads,
                                         double threshold) {
    auto family = enumerate_family(l, X, E.conductor(), weight);
    if (family.empty()) throw EmptyFamily("no valid conductors up to the family bound");

    int64_t q_max = 1;
    for (const auto& chi : family) q_max = std::max(q_max, chi.conductor());
    double N_max = static_cast<double>(q_max) * static_cast<double>(q_max) *
                   static_cast<double>(E.conductor());
    std::size_t cap = needed_terms(N_max, 0.5) + 8;
    auto a = hecke_coefficients(E, cap, provider);

    int r_Q;
    if (E.known_rank()) {
        r_Q = *E.known_rank();
    } else {
        std::size_t cap0 = needed_terms(static_cast<double>(E.conductor()), 0.5) + 8;
        r_Q = analytic_rank(build_completed(E, nullptr, cap0, provider), threshold).order;
    }

    auto rows = parallel_map<TwistRankRow>(family.size(), threads, [&](std::size_t i) {
        const DirichletCharacter& chi = family[i];
        int64_t q = chi.conductor();
        double N = static_cast<double>(q) * static_cast<double>(q) *
                   static_cast<double>(E.conductor());
        std::size_t want = std::min(cap, needed_terms(N, 0.5) + 8);
        CompletedLSeries L;
        L.twist_conductor = q;
        L.conductor = N;
        L.dual_flag = false;
        L.coefficients.resize(want + 1);
        for (std::size_t n = 1; n <= want; ++n)
            L.coefficients[n] =
                (a[n] / std::sqrt(static_cast<double>(n))) * chi.value(static_cast<int64_t>(n));

        TwistRankRow row;
        row.conductor = q;
        row.char_index = i;
        row.descriptor = chi.local_descriptor();
        CentralSums cs = central_sums(L);
        std::complex<double> omega;
        try {
            omega = solve_root_number(cs);
        } catch (const IllConditioned&) {
            omega = root_number_numeric(L);
        }
        row.omega = omega;
        try {
            RankEstimate est = rank_from_sums(cs, omega, threshold);
            row.order = est.order;
            row.margin = est.certified_margin;
        } catch (const RankOverflow&) {
            row.overflow = true;
        }
        return row;
    });

    FamilyRankSummary out;
    out.twists = std::move(rows);

    // Galois orbits: exponent tuples over the same moduli related by a unit
    // scaling mod l; each orbit is one cyclic field of the family
    std::map<std::vector<std::pair<int64_t, int>>, std::vector<std::size_t>> orbits;
    for (std::size_t i = 0; i < family.size(); ++i) {
        std::vector<std::pair<int64_t, int>> key, cand;
        for (int c = 1; c < l; ++c) {
            cand.clear();
            for (const auto& lc : family[i].locals())
                cand.emplace_back(lc.modulus, static_cast<int>(lc.exponent_unit * c % l));
            if (c == 1 || cand < key) key = cand;
        }
        orbits[key].push_back(i);
    }
    double wsum = 0, wrank = 0;
    for (const auto& [key, members] : orbits) {
        FieldRankRow fr;
        fr.conductor = out.twists[members.front()].conductor;
        fr.weight = weight(static_cast<double>(fr.conductor) / X);
        fr.field_rank = r_Q;
        for (std::size_t i : members) {
            if (out.twists[i].overflow) fr.overflow = true;
            fr.field_rank += out.twists[i].order;
        }
        if (!fr.overflow && fr.weight > 0) {
            wsum += fr.weight;
            wrank += fr.weight * fr.field_rank;
        }
        out.fields.push_back(std::move(fr));
    }
    out.weighted_average_rank = wsum > 0 ? wrank / wsum : 0.0;

    std::size_t usable = 0, vanishing = 0;
    for (const auto& t : out.twists) {
        if (t.overflow) { ++out.overflow_count; continue; }
        ++usable;
        if (t.order >= 1) ++vanishing;
    }
    out.vanishing_proportion = usable ? static_cast<double>(vanishing) / usable : 0.0;
    return out;
}

double l_value_series(const EllipticCurve& E, std::size_t cap, const LocalProvider& provider) {
    double N = static_cast<double>(E.conductor());
    if (cap < needed_terms(N, 1.0))
        throw InsufficientCoefficients("coefficient cap below the truncation requirement");
    auto a = hecke_coefficients(E, cap, provider);
    double base = 2.0 * kPi / std::sqrt(N);
    double s = 0;
    for (std::size_t n = 1; n <= cap; ++n) {
        double x = base * static_cast<double>(n);
        if (x > 720.0) break;
        s += a[n] / static_cast<double>(n) * std::exp(-x);
    }
    return 2.0 * s;
}

double l_prime_series(const EllipticCurve& E, std::size_t cap, const LocalProvider& provider) {
    double N = static_cast<double>(E.conductor());
    if (cap < needed_terms(N, 1.0))
        throw InsufficientCoefficients("coefficient cap below the truncation requirement");
    auto a = hecke_coefficients(E, cap, provider);
    double base = 2.0 * kPi / std::sqrt(N);
    double s = 0;
    for (std::size_t n = 1; n <= cap; ++n) {
        double x = base * static_cast<double>(n);
        if (x > 720.0) break;
        s += a[n] / static_cast<double>(n) * exp_integral_e1(x);
    }
    return 2.0 * s;
}

} // namespace lowlying
