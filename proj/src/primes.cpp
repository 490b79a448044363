#include "lowlying/primes.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lowlying {

std::vector<int64_t> primes_up_to(int64_t bound) {
    std::vector<int64_t> out;
    if (bound < 2) return out;
    std::vector<uint8_t> composite(static_cast<size_t>(bound) + 1, 0);
    for (int64_t i = 2; i * i <= bound; ++i)
        if (!composite[static_cast<size_t>(i)])
            for (int64_t j = i * i; j <= bound; j += i)
                composite[static_cast<size_t>(j)] = 1;
    for (int64_t i = 2; i <= bound; ++i)
        if (!composite[static_cast<size_t>(i)]) out.push_back(i);
    return out;
}

bool is_prime(int64_t n) {
    if (n < 2) return false;
    for (int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<std::pair<int64_t, int>> factorize(int64_t n) {
    if (n < 1) throw std::invalid_argument("factorize: n must be positive");
    std::vector<std::pair<int64_t, int>> out;
    for (int64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            int e = 0;
            while (n % d == 0) { n /= d; ++e; }
            out.emplace_back(d, e);
        }
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

int64_t gcd64(int64_t a, int64_t b) {
    return std::gcd(a, b);
}

int64_t pow_mod(int64_t base, uint64_t exp, int64_t m) {
    if (m <= 0) throw std::invalid_argument("pow_mod: modulus must be positive");
    unsigned __int128 r = 1, b = static_cast<unsigned __int128>(((base % m) + m) % m);
    while (exp) {
        if (exp & 1) r = r * b % static_cast<uint64_t>(m);
        b = b * b % static_cast<uint64_t>(m);
        exp >>= 1;
    }
    return static_cast<int64_t>(r);
}

int64_t euler_phi(int64_t n) {
    int64_t r = n;
    for (auto [p, e] : factorize(n)) r -= r / p;
    return r;
}

int64_t primitive_root(int64_t m) {
    if (m == 2) return 1;
    if (m == 4) return 3;
    int64_t phi = euler_phi(m);
    auto fac = factorize(phi);
    for (int64_t g = 2; g < m; ++g) {
        if (gcd64(g, m) != 1) continue;
        bool ok = true;
        for (auto [p, e] : fac) {
            if (pow_mod(g, static_cast<uint64_t>(phi / p), m) == 1) { ok = false; break; }
        }
        if (ok) return g;
    }
    throw std::invalid_argument("primitive_root: unit group not cyclic");
}

} // namespace lowlying
