#include "chow/arith.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "chow/errors.hpp"

namespace chow {

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    mpz_class z(static_cast<long>(n));
    return mpz_probab_prime_p(z.get_mpz_t(), 30) != 0;
}

std::int64_t next_prime(std::int64_t n) {
    mpz_class z(static_cast<long>(n)), r;
    mpz_nextprime(r.get_mpz_t(), z.get_mpz_t());
    return r.get_si();
}

int valuation(const mpz_class& n, std::int64_t p) {
    if (n == 0) throw invalid_input("valuation of zero");
    mpz_class m = n, pp(static_cast<long>(p));
    return static_cast<int>(mpz_remove(m.get_mpz_t(), m.get_mpz_t(), pp.get_mpz_t()));
}

namespace {

// Pollard-Brent; returns a proper factor of the composite m or 0.
mpz_class rho_factor(const mpz_class& m) {
    for (unsigned long c = 1; c < 20; ++c) {
        mpz_class x = 2, y = 2, q = 1, g = 1, ys, t;
        auto step = [&](mpz_class& v) {
            v = v * v + c;
            mpz_mod(v.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
        };
        std::size_t r = 1;
        constexpr std::size_t batch = 128, cap = std::size_t{1} << 22;
        while (g == 1 && r < cap) {
            x = y;
            for (std::size_t i = 0; i < r; ++i) step(y);
            for (std::size_t k = 0; k < r && g == 1; k += batch) {
                ys = y;
                for (std::size_t i = 0; i < std::min(batch, r - k); ++i) {
                    step(y);
                    t = x - y;
                    q *= abs(t);
                    mpz_mod(q.get_mpz_t(), q.get_mpz_t(), m.get_mpz_t());
                }
                g = gcd(q, m);
            }
            r *= 2;
        }
        if (g == m) {
            do {
                step(ys);
                t = x - ys;
                g = gcd(mpz_class(abs(t)), m);
            } while (g == 1);
        }
        if (g != 1 && g != m) return g;
    }
    return 0;
}

void split_into(const mpz_class& m, std::map<std::int64_t, int>& out) {
    if (m == 1) return;
    if (mpz_probab_prime_p(m.get_mpz_t(), 30) != 0) {
        if (!m.fits_slong_p()) throw bound_exceeded("factor_integer: prime factor " + m.get_str() + " too large");
        ++out[m.get_si()];
        return;
    }
    mpz_class d = rho_factor(m);
    if (d == 0) throw bound_exceeded("factor_integer: could not split " + m.get_str());
    split_into(d, out);
    split_into(m / d, out);
}

} // namespace

std::vector<std::pair<std::int64_t, int>> factor_integer(const mpz_class& n) {
    if (n == 0) throw invalid_input("cannot factor zero");
    std::map<std::int64_t, int> found;
    mpz_class m = abs(n);
    constexpr std::int64_t trial_limit = 1000;
    for (std::int64_t p = 2; p <= trial_limit && m != 1; p = (p == 2 ? 3 : p + 2)) {
        if (mpz_cmp_si(m.get_mpz_t(), static_cast<long>(p) * p) < 0) break;
        int e = 0;
        while (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(p))) {
            mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), static_cast<unsigned long>(p));
            ++e;
        }
        if (e) found[p] = e;
    }
    split_into(m, found);
    return {found.begin(), found.end()};
}

int kronecker_prime(const mpz_class& d, std::int64_t p) {
    if (p == 2) {
        if (mpz_even_p(d.get_mpz_t())) return 0;
        mpz_class r;
        mpz_fdiv_r_ui(r.get_mpz_t(), d.get_mpz_t(), 8);
        return (r == 1 || r == 7) ? 1 : -1;
    }
    mpz_class pp(static_cast<long>(p));
    return mpz_legendre(d.get_mpz_t(), pp.get_mpz_t());
}

} // namespace chow
