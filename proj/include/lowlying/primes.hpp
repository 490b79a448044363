#pragma once
#include <cstdint>
#include <vector>

namespace lowlying {

// Primes up to and including `bound`.
std::vector<int64_t> primes_up_to(int64_t bound);

bool is_prime(int64_t n);

// Prime factorization as (prime, exponent) pairs, ascending.
std::vector<std::pair<int64_t, int>> factorize(int64_t n);

int64_t gcd64(int64_t a, int64_t b);

// (base^exp) mod m, m > 0
int64_t pow_mod(int64_t base, uint64_t exp, int64_t m);

// smallest positive primitive root mod m, for m with a cyclic unit group
int64_t primitive_root(int64_t m);

// Euler phi
int64_t euler_phi(int64_t n);

} // namespace lowlying
