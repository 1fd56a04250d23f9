#pragma once

// Small rational-integer helpers shared by the field and order code.

#include <cstdint>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace chow {

bool is_prime(std::int64_t n);
std::int64_t next_prime(std::int64_t n);

/// p-adic valuation of a nonzero integer.
int valuation(const mpz_class& n, std::int64_t p);

/// Prime factorisation of |n| (n != 0) as (prime, exponent) pairs in
/// increasing order (trial division, then Pollard rho). Throws
/// bound_exceeded for prime factors beyond 2^63 or cofactors rho cannot split.
std::vector<std::pair<std::int64_t, int>> factor_integer(const mpz_class& n);

/// Kronecker symbol (d | p) for a prime p.
int kronecker_prime(const mpz_class& d, std::int64_t p);

} // namespace chow
