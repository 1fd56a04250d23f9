#pragma once

// Quadratic number fields K = Q(sqrt(D)) for a fundamental discriminant D.
//
// The maximal order is Z[w] with w = (D + sqrt(D))/2, so w^2 = D*w - (D^2 - D)/4.
// Elements are written (x + y*sqrt(D)) / (2*den); ideals are
// scale * (aZ + (b + w)Z) with a | N(b + w) and 0 <= b < a.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "chow/abgroup.hpp"
#include "chow/place.hpp"

namespace chow {

using Rational = mpq_class;

namespace detail {
struct FieldCache;
}

/// Largest |D| for which class groups are enumerated.
inline constexpr long default_class_group_bound = 1000000;
/// Default ceiling on reduction / continued-fraction steps.
inline constexpr std::size_t default_step_limit = 10000000;

bool is_fundamental_discriminant(const Integer& d);

class QuadField {
public:
    /// Throws invalid_input unless d is a fundamental discriminant.
    explicit QuadField(const Integer& d);

    const Integer& discriminant() const { return disc_; }
    bool is_real() const { return disc_ > 0; }
    /// N(w) = (D^2 - D)/4.
    const Integer& omega_norm() const { return omega_norm_; }
    /// floor(sqrt(|D|)).
    const Integer& isqrt() const { return isqrt_; }

    /// Number of roots of unity in the maximal order.
    int torsion_units() const;

    friend bool operator==(const QuadField& a, const QuadField& b) { return a.disc_ == b.disc_; }

    detail::FieldCache& cache() const { return *cache_; }

private:
    Integer disc_;
    Integer omega_norm_;
    Integer isqrt_;
    std::shared_ptr<detail::FieldCache> cache_;
};

QuadField make_field(const Integer& d);

/// Element (x + y*sqrt(D)) / (2*den) of K, kept in lowest terms: den is the
/// least positive integer with den*alpha in the maximal order, which forces
/// x == y*D (mod 2).
class QElement {
public:
    QElement() = default;

    static QElement from_parts(const QuadField& f, Integer x, Integer y, Integer den = 1);
    static QElement from_integer(const QuadField& f, const Integer& n);
    static QElement from_rational(const QuadField& f, const Rational& q);
    /// u + v*w
    static QElement from_basis(const QuadField& f, const Integer& u, const Integer& v);
    static QElement omega(const QuadField& f);

    const Integer& x() const { return x_; }
    const Integer& y() const { return y_; }
    const Integer& den() const { return den_; }
    const Integer& discriminant() const { return disc_; }

    /// Coordinates (u, v) of den*alpha = u + v*w in the integral basis.
    Integer basis_u() const;
    const Integer& basis_v() const { return y_; }

    bool is_zero() const { return x_ == 0 && y_ == 0; }
    bool is_integral() const { return den_ == 1; }
    bool is_rational() const { return y_ == 0; }

    Rational norm() const;
    Rational trace() const;
    QElement conjugate() const;
    QElement inverse() const;

    /// "(1+sqrt(-7))/2", "-3", "1+sqrt(2)", ...
    std::string to_string() const;

    friend QElement operator+(const QElement& a, const QElement& b);
    friend QElement operator-(const QElement& a, const QElement& b);
    friend QElement operator-(const QElement& a);
    friend QElement operator*(const QElement& a, const QElement& b);
    friend QElement operator/(const QElement& a, const QElement& b);
    friend bool operator==(const QElement&, const QElement&) = default;

private:
    // alpha = r + s*sqrt(D)
    static QElement from_rs(const Integer& disc, const Rational& r, const Rational& s);
    Rational r() const;
    Rational s() const;

    Integer disc_;
    Integer x_ = 0;
    Integer y_ = 0;
    Integer den_ = 1;
};

/// Fractional ideal scale * (aZ + (b + w)Z) of the maximal order.
class QIdeal {
public:
    QIdeal() = default;

    static QIdeal unit();
    /// Validates a > 0 and a | N(b + w); reduces b modulo a.
    static QIdeal make(const QuadField& f, const Integer& a, const Integer& b, Rational scale = 1);
    static QIdeal principal(const QuadField& f, const QElement& alpha);

    const Integer& a() const { return a_; }
    const Integer& b() const { return b_; }
    const Rational& scale() const { return scale_; }

    /// Middle coefficient B = 2b + D of the attached form (a, B, c).
    Integer form_b(const QuadField& f) const;
    QIdeal primitive_part() const;

    Rational norm() const;
    bool is_integral() const;
    bool contains(const QuadField& f, const QElement& alpha) const;

    std::string to_string() const;

    friend bool operator==(const QIdeal&, const QIdeal&) = default;

private:
    friend QIdeal ideal_from_lattice(const QuadField&, std::span<const std::pair<Integer, Integer>>, const Rational&);

    Integer a_ = 1;
    Integer b_ = 0;
    Rational scale_ = 1;
};

/// Ideal generated over Z by scale * (u_k + v_k*w).
QIdeal ideal_from_lattice(const QuadField& f, std::span<const std::pair<Integer, Integer>> gens,
                          const Rational& scale);

QIdeal ideal_mul(const QuadField& f, const QIdeal& i, const QIdeal& j);
QIdeal ideal_conjugate(const QuadField& f, const QIdeal& i);
QIdeal ideal_inverse(const QuadField& f, const QIdeal& i);
QIdeal ideal_pow(const QuadField& f, const QIdeal& i, std::int64_t k);
Rational ideal_norm(const QIdeal& i);

enum class SplitKind { split, inert, ramified };

const char* to_string(SplitKind k);

/// Maximal ideal of the maximal order over the rational prime p. For split
/// primes branch 0 is the place whose normal-form b is the smaller residue.
struct PrimePlace {
    std::int64_t p = 0;
    SplitKind kind = SplitKind::inert;
    int branch = 0;
    int degree = 2;
    int ramification = 1;
    Integer b;

    PlaceId id() const { return {p, branch}; }
    /// "p.branch" when p splits, "p" otherwise.
    std::string name() const;
};

/// Places over p in branch order. Throws invalid_input if p is not prime.
std::vector<PrimePlace> splitting(const QuadField& f, std::int64_t p);
PrimePlace place_of(const QuadField& f, PlaceId id);
QIdeal prime_to_ideal(const QuadField& f, const PrimePlace& place);

/// Exponent of the place in the factorisation of alpha * O_K.
std::int64_t ord_at(const QuadField& f, const PrimePlace& place, const QElement& alpha);

/// Class group of the maximal order. The user generators of `group` are
/// the prime ideals `generator_places`; `invariant_representatives` holds a
/// reduced ideal for each invariant-factor generator.
struct ClassGroup {
    AbelianGroup group;
    std::vector<PrimePlace> generator_places;
    std::vector<QIdeal> invariant_representatives;
    std::size_t class_number = 1;
};

/// Memoised per field. Throws bound_exceeded when |D| > bound.
const ClassGroup& class_group(const QuadField& f, long bound = default_class_group_bound);
GroupElement ideal_class(const QuadField& f, const QIdeal& i);

/// A generator of i when i is principal, nullopt otherwise. Imaginary
/// generators are normalised to x > 0, or x == 0 and y > 0.
std::optional<QElement> is_principal(const QuadField& f, const QIdeal& i,
                                     std::size_t step_limit = default_step_limit);

/// Fundamental unit eps > 1 of a real field, from the continued fraction
/// of the integral generator (1 + sqrt(D))/2 or sqrt(D/4).
QElement fundamental_unit(const QuadField& f, std::size_t step_limit = default_step_limit);

/// The unit obtained by walking the cycle of reduced principal ideals of a
/// real field once (equal to the fundamental unit up to sign and inversion).
QElement reduced_cycle_unit(const QuadField& f, std::size_t step_limit = default_step_limit);

} // namespace chow
