#include "lowlying/characters.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "lowlying/errors.hpp"
#include "lowlying/primes.hpp"

namespace lowlying {

double WeightFunction::operator()(double t) const {
    if (kind == WeightKind::Sharp)
        return (t > 0.0 && t <= 1.0) ? 1.0 : 0.0;
    double d = t - 1.0;
    double s = 1.0 - 4.0 * d * d;
    if (s <= 0.0) return 0.0;
    return std::exp(-1.0 / s);
}

WeightKind weight_from_name(const std::string& s) {
    if (s == "bump") return WeightKind::SmoothBump;
    if (s == "sharp") return WeightKind::Sharp;
    throw ConfigError("unknown weight kind: " + s);
}

std::string weight_name(WeightKind k) {
    return k == WeightKind::SmoothBump ? "bump" : "sharp";
}

std::vector<std::complex<double>> roots_of_unity(int l) {
    // mirrored so that z[l-k] is the exact floating-point conjugate of z[k]
    std::vector<std::complex<double>> z(static_cast<size_t>(l));
    for (int k = 0; 2 * k <= l; ++k) {
        double a = 2.0 * std::numbers::pi * k / l;
        z[static_cast<size_t>(k)] = {std::cos(a), std::sin(a)};
        if (k > 0) z[static_cast<size_t>(l - k)] = std::conj(z[static_cast<size_t>(k)]);
    }
    return z;
}

DirichletCharacter::DirichletCharacter(int l, std::vector<LocalCharacter> locals)
    : l_(l), locals_(std::move(locals)) {
    std::sort(locals_.begin(), locals_.end(),
              [](const LocalCharacter& a, const LocalCharacter& b) { return a.modulus < b.modulus; });
    conductor_ = 1;
    for (const auto& lc : locals_) conductor_ *= lc.modulus;
}

int DirichletCharacter::exp_at(int64_t n) const {
    int64_t e = 0;
    for (const auto& lc : locals_) {
        int64_t r = n % lc.modulus;
        if (r < 0) r += lc.modulus;
        int32_t d = (*lc.dlog)[static_cast<size_t>(r)];
        if (d < 0) return -1;
        e += static_cast<int64_t>(lc.exponent_unit) * (d % l_);
    }
    return static_cast<int>(e % l_);
}

std::complex<double> DirichletCharacter::value(int64_t n) const {
    int e = exp_at(n);
    if (e < 0) return {0.0, 0.0};
    // mirror the upper half so conjugate characters produce exact conjugates
    bool flip = 2 * e > l_;
    double a = 2.0 * std::numbers::pi * (flip ? l_ - e : e) / l_;
    return {std::cos(a), flip ? -std::sin(a) : std::sin(a)};
}

DirichletCharacter DirichletCharacter::conjugate() const {
    std::vector<LocalCharacter> conj = locals_;
    for (auto& lc : conj) lc.exponent_unit = l_ - lc.exponent_unit;
    return DirichletCharacter(l_, std::move(conj));
}

std::string DirichletCharacter::local_descriptor() const {
    std::string out;
    for (const auto& lc : locals_) {
        if (!out.empty()) out += ";";
        out += std::to_string(lc.modulus) + ":" + std::to_string(lc.generator) + ":" +
               std::to_string(lc.exponent_unit);
    }
    return out;
}

bool is_valid_conductor(int64_t q, int l, int64_t Q_E) {
    if (q <= 1) return false;
    if (gcd64(q, Q_E) != 1) return false;
    int64_t m = q;
    int b = 0;
    while (m % l == 0) { m /= l; ++b; }
    if (b != 0 && b != 2) return false;
    for (auto [p, e] : factorize(m)) {
        if (e > 1) return false;
        if (p % l != 1) return false;
    }
    return true;
}

std::vector<int64_t> valid_conductors(int l, int64_t bound, int64_t Q_E) {
    // squarefree products of primes = 1 (mod l), optionally times l^2
    std::vector<int64_t> base;
    for (int64_t p : primes_up_to(bound))
        if (p % l == 1 && Q_E % p != 0) base.push_back(p);

    std::vector<int64_t> out;
    std::vector<int64_t> stack{1};
    // depth-first over the sorted prime list; every partial product counts
    std::function<void(size_t, int64_t)> rec = [&](size_t i, int64_t acc) {
        for (size_t k = i; k < base.size(); ++k) {
            if (base[k] > bound / acc) break;
            int64_t next = acc * base[k];
            out.push_back(next);
            rec(k + 1, next);
        }
    };
    rec(0, 1);

    int64_t l2 = static_cast<int64_t>(l) * l;
    if (l2 <= bound && Q_E % l != 0) {
        size_t plain = out.size();
        out.push_back(l2);
        for (size_t i = 0; i < plain; ++i)
            if (out[i] <= bound / l2) out.push_back(out[i] * l2);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

using DlogTable = std::shared_ptr<const std::vector<int32_t>>;

DlogTable build_dlog(int64_t modulus, int64_t generator) {
    auto table = std::make_shared<std::vector<int32_t>>(static_cast<size_t>(modulus), -1);
    int64_t phi = euler_phi(modulus);
    int64_t v = 1;
    for (int64_t k = 0; k < phi; ++k) {
        (*table)[static_cast<size_t>(v)] = static_cast<int32_t>(k);
        v = v * generator % modulus;
    }
    return table;
}

struct LocalStock {
    int64_t modulus, generator;
    DlogTable dlog;
};

} // namespace

std::vector<DirichletCharacter> enumerate_family(int l, double X, int64_t Q_E,
                                                 const WeightFunction& weight,
                                                 std::size_t size_cap) {
    if (X < 1.0) throw ConfigError("enumerate_family: X must be >= 1");
    auto bound = static_cast<int64_t>(weight.support_factor() * X + 1e-9);
    auto conductors = valid_conductors(l, bound, Q_E);

    std::size_t total = 0;
    for (int64_t q : conductors) {
        std::size_t n = 1;
        for (auto [p, e] : factorize(q)) { (void)e; n *= static_cast<size_t>(l - 1); }
        total += n;
        if (total > size_cap)
            throw FamilyTooLarge("family would exceed " + std::to_string(size_cap) +
                                 " characters");
    }

    std::map<int64_t, LocalStock> stock;
    auto local_for = [&](int64_t modulus) -> const LocalStock& {
        auto it = stock.find(modulus);
        if (it == stock.end()) {
            int64_t g = primitive_root(modulus);
            it = stock.emplace(modulus, LocalStock{modulus, g, build_dlog(modulus, g)}).first;
        }
        return it->second;
    };

    std::vector<DirichletCharacter> family;
    family.reserve(total);
    for (int64_t q : conductors) {
        std::vector<int64_t> moduli;
        int64_t m = q;
        if (m % l == 0) { moduli.push_back(static_cast<int64_t>(l) * l); m /= l * l; }
        for (auto [p, e] : factorize(m)) { (void)e; moduli.push_back(p); }
        std::sort(moduli.begin(), moduli.end());

        size_t k = moduli.size();
        // all exponent tuples in {1..l-1}^k, lexicographic
        std::vector<std::vector<int>> tuples;
        std::vector<int> cur(k, 1);
        for (;;) {
            tuples.push_back(cur);
            size_t i = k;
            while (i > 0 && cur[i - 1] == l - 1) { cur[i - 1] = 1; --i; }
            if (i == 0) break;
            ++cur[i - 1];
        }
        // pair each tuple with its conjugate; leaders ordered lexicographically
        auto conj_of = [&](const std::vector<int>& t) {
            std::vector<int> c(t.size());
            for (size_t i = 0; i < t.size(); ++i) c[i] = l - t[i];
            return c;
        };
        std::vector<std::vector<int>> leaders;
        for (const auto& t : tuples)
            if (t <= conj_of(t)) leaders.push_back(t);
        std::sort(leaders.begin(), leaders.end());

        auto make_char = [&](const std::vector<int>& t) {
            std::vector<LocalCharacter> locals;
            locals.reserve(k);
            for (size_t i = 0; i < k; ++i) {
                const LocalStock& s = local_for(moduli[i]);
                locals.push_back(LocalCharacter{s.modulus, s.generator, t[i], s.dlog});
            }
            return DirichletCharacter(l, std::move(locals));
        };
        for (const auto& t : leaders) {
            family.push_back(make_char(t));
            auto c = conj_of(t);
            if (c != t) family.push_back(make_char(c));
        }
    }
    return family;
}

double weighted_count(int l, double X, int64_t Q_E, const WeightFunction& weight) {
    double w = 0.0;
    for (const auto& chi : enumerate_family(l, X, Q_E, weight))
        w += weight(static_cast<double>(chi.conductor()) / X);
    return w;
}

double conductor_log_sum(int l, double X, int64_t Q_E, const WeightFunction& weight) {
    double s = 0.0;
    for (const auto& chi : enumerate_family(l, X, Q_E, weight))
        s += weight(static_cast<double>(chi.conductor()) / X) *
             std::log(static_cast<double>(chi.conductor()));
    return s;
}

std::complex<double> family_char_sum(int l, double X, int64_t Q_E,
                                     const WeightFunction& weight, int64_t n) {
    std::complex<double> s{0.0, 0.0};
    for (const auto& chi : enumerate_family(l, X, Q_E, weight))
        s += weight(static_cast<double>(chi.conductor()) / X) * chi.value(n);
    return s;
}

} // namespace lowlying
