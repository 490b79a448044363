#include "lowlying/density.hpp"

#include <cmath>

#include "lowlying/errors.hpp"
#include "lowlying/parallel.hpp"
#include "lowlying/primes.hpp"

namespace lowlying {

namespace {

struct PrimeTerms {
    double logL = 0.0;
    // c1[p] = (log p / sqrt p) a_f(p) phihat(log p / log L), p <= L^sigma
    std::vector<std::pair<int64_t, double>> c1;
    // c2[p] = (log p / p) a_f(p^2) phihat(2 log p / log L), p <= L^(sigma/2)
    std::vector<std::pair<int64_t, double>> c2;
};

int64_t power_cutoff(double logL, double exponent) {
    return static_cast<int64_t>(std::exp(exponent * logL) + 1e-9);
}

PrimeTerms build_prime_terms(const EllipticCurve& E, double X, const TestFunction& phi,
                             const LocalProvider& provider) {
    PrimeTerms t;
    double L = X * X;
    t.logL = std::log(L);
    int64_t p1 = power_cutoff(t.logL, phi.sigma());
    int64_t p2 = power_cutoff(t.logL, phi.sigma() / 2.0);
    for (int64_t p : primes_up_to(p1)) {
        LocalData d = provider ? provider(p) : reduction_type(E, p);
        double lp = std::log(static_cast<double>(p));
        t.c1.emplace_back(p, lp / std::sqrt(static_cast<double>(p)) * a_f(d) *
                                 phi.phi_hat(lp / t.logL));
        if (p <= p2)
            t.c2.emplace_back(p, lp / static_cast<double>(p) * a_f_sq(d) *
                                     phi.phi_hat(2.0 * lp / t.logL));
    }
    return t;
}

// s1 and s2 for one character against precomputed per-prime factors
std::pair<double, double> twist_sums(const PrimeTerms& t, const DirichletCharacter& chi) {
    int l = chi.order();
    auto zeta = roots_of_unity(l);
    std::vector<double> re(static_cast<size_t>(l));
    for (int k = 0; k < l; ++k) re[static_cast<size_t>(k)] = zeta[static_cast<size_t>(k)].real();
    double s1 = 0.0, s2 = 0.0;
    for (auto [p, c] : t.c1) {
        int e = chi.exp_at(p);
        if (e >= 0) s1 += c * re[static_cast<size_t>(e)];
    }
    for (auto [p, c] : t.c2) {
        int e = chi.exp_at(p);
        if (e >= 0) s2 += c * re[static_cast<size_t>((2 * e) % l)];
    }
    return {-2.0 / t.logL * s1, -2.0 / t.logL * s2};
}

DensityReport assemble(double conductor_term, double s1, double s2, double predicted,
                       double family_size, double L, const std::string& symmetry) {
    DensityReport r;
    r.conductor_term = conductor_term;
    r.s1 = s1;
    r.s2 = s2;
    r.total = conductor_term + s1 + s2;
    r.predicted = predicted;
    r.family_size = family_size;
    r.L_param = L;
    r.error_budget = kErrorBudgetC / std::log(L);
    r.symmetry = symmetry;
    return r;
}

} // namespace

DensityReport one_level_density_twist(const EllipticCurve& E, const DirichletCharacter& chi,
                                      double X, const TestFunction& phi,
                                      const LocalProvider& provider) {
    if (gcd64(chi.conductor(), E.conductor()) != 1)
        throw ConductorClash("character conductor shares a factor with the curve conductor");
    PrimeTerms t = build_prime_terms(E, X, phi, provider);
    double q = static_cast<double>(chi.conductor());
    double ct = phi.phihat0() *
                (std::log(static_cast<double>(E.conductor())) + 2.0 * std::log(q)) / t.logL;
    auto [s1, s2] = twist_sums(t, chi);
    return assemble(ct, s1, s2, phi.phihat0(), 1.0, X * X, "U");
}

DensityReport family_average_cyclic(const EllipticCurve& E, int l, double X,
                                    const TestFunction& phi, const WeightFunction& weight,
                                    const LocalProvider& provider, unsigned threads) {
    auto family = enumerate_family(l, X, E.conductor(), weight);
    if (family.empty()) throw EmptyFamily("no valid conductors in range");
    PrimeTerms t = build_prime_terms(E, X, phi, provider);
    double logQE = std::log(static_cast<double>(E.conductor()));

    struct Row { double w, ct, s1, s2; };
    auto rows = parallel_map<Row>(family.size(), threads, [&](std::size_t i) {
        const auto& chi = family[i];
        double w = weight(static_cast<double>(chi.conductor()) / X);
        if (w == 0.0) return Row{0.0, 0.0, 0.0, 0.0};
        double ct = phi.phihat0() *
                    (logQE + 2.0 * std::log(static_cast<double>(chi.conductor()))) / t.logL;
        auto [s1, s2] = twist_sums(t, chi);
        return Row{w, ct, s1, s2};
    });

    double W = 0.0, ct = 0.0, s1 = 0.0, s2 = 0.0;
    for (const Row& r : rows) {
        W += r.w;
        ct += r.w * r.ct;
        s1 += r.w * r.s1;
        s2 += r.w * r.s2;
    }
    if (W <= 0.0) throw EmptyFamily("all family weights vanish");
    return assemble(ct / W, s1 / W, s2 / W, phi.phihat0(), W, X * X, "U");
}

bool rank_inequality_check(const std::vector<int>& ranks, const std::vector<double>& weights,
                           double density_average, const TestFunction& phi, double tol) {
    if (ranks.size() != weights.size())
        throw ConfigError("rank_inequality_check: ranks and weights differ in length");
    double W = 0.0, R = 0.0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        W += weights[i];
        R += weights[i] * ranks[i];
    }
    return R * phi.phi0() <= W * density_average + tol;
}

} // namespace lowlying
