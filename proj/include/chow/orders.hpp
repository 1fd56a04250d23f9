#pragma once

// One-dimensional orders O inside a field K with normalization Õ.
//
// Two backends share one representation: quadratic orders Z + fÕ, computed
// from the discriminant, and orders described by declared splitting data.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chow/abgroup.hpp"
#include "chow/place.hpp"
#include "chow/quadfield.hpp"

namespace chow {

struct DeclaredField;

enum class Backend { quadratic, declared };
enum class Level { order, normalization };

/// Finite formal sum of places. Zero coefficients are never stored.
class Divisor {
public:
    explicit Divisor(Level level = Level::order) : level_(level) {}

    Level level() const { return level_; }
    const std::map<PlaceId, Integer>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Integer coefficient(PlaceId id) const;

    void add(PlaceId id, const Integer& c);
    Divisor& operator+=(const Divisor& o);
    friend Divisor operator+(Divisor a, const Divisor& b) { return a += b; }
    friend Divisor operator-(const Divisor& a);
    friend Divisor operator-(const Divisor& a, const Divisor& b) { return a + (-b); }
    friend Divisor operator*(const Integer& k, const Divisor& a);
    friend bool operator==(const Divisor&, const Divisor&) = default;

private:
    Level level_;
    std::map<PlaceId, Integer> terms_;
};

/// A maximal ideal of Õ over a non-invertible prime of O.
struct PlaceAbove {
    std::string label;
    PlaceId id;
    /// d_ij: degree of the residue extension over O/p_i.
    int degree = 1;
    /// Exponent of the place in pÕ.
    int ramification = 1;
};

struct NonInvertiblePrime {
    std::string label;
    PlaceId id;
    std::int64_t p = 0;
    /// |O/p_i|
    Integer residue_size;
    std::vector<PlaceAbove> places;
    Integer g;
    std::vector<Integer> lambdas;
};

class Order {
public:
    Backend backend() const { return backend_; }
    bool is_maximal() const { return primes_.empty(); }
    const std::vector<NonInvertiblePrime>& noninvertible_primes() const { return primes_; }

    /// Quadratic backend.
    const QuadField& field() const;
    const Integer& conductor() const;

    /// Declared backend.
    const DeclaredField& declared() const;
    const std::vector<std::size_t>& selection() const { return selection_; }

    /// Class group of Õ. Throws bound_exceeded for large discriminants.
    const AbelianGroup& class_group() const;
    /// Class of an Õ-place; throws data_error when the declared image is missing.
    GroupElement place_class(PlaceId id) const;

    /// Õ-place of an order-level place that is not a non-invertible prime.
    PlaceId normalization_place(PlaceId order_id) const;

    /// Index of the non-invertible prime containing the Õ-place, if any.
    std::optional<std::size_t> prime_below(PlaceId id) const;

    /// Label of a place; order level uses the O-prime labels.
    std::string label(PlaceId id, Level level) const;
    /// Inverse of label(); throws invalid_input for unknown places.
    PlaceId resolve(std::string_view label, Level level) const;

    /// "Z + 2*O_K in Q(sqrt(-7))", "declared order {0,1}", ...
    std::string describe() const;

    /// Re-derive g_i and lambda_ij after reordering the places above each
    /// prime by `perm` (used to check independence of the Bezout choice).
    Order with_place_order(const std::vector<std::vector<std::size_t>>& perm) const;

private:
    friend Order order_from_conductor(const QuadField& f, const Integer& conductor);
    friend Order make_declared_order(std::shared_ptr<const DeclaredField> data, std::vector<std::size_t> selection);

    void finish_primes();

    Backend backend_ = Backend::quadratic;
    std::optional<QuadField> field_;
    Integer conductor_ = 1;
    std::shared_ptr<const DeclaredField> declared_;
    std::shared_ptr<const AbelianGroup> declared_class_group_;
    std::vector<std::size_t> selection_;
    std::vector<NonInvertiblePrime> primes_;
};

/// The order Z + f*O_K.
Order order_from_conductor(const QuadField& f, const Integer& conductor);

/// Declared order whose non-invertible primes are the selected records.
Order make_declared_order(std::shared_ptr<const DeclaredField> data, std::vector<std::size_t> selection);

/// Z/g_i for a non-invertible prime.
AbelianGroup local_chow(const Order& o, std::size_t i);

/// Divisor of alpha over Õ (quadratic backend only).
Divisor div_normalization(const QuadField& f, const QElement& alpha);
Divisor pushforward(const Order& o, const Divisor& d);
Divisor div_over_order(const Order& o, const QElement& alpha);

/// (d_ij/g_i) Q_i - P_ij with Q_i = sum_k lambda_ik P_ik, in (i, j) order.
std::vector<Divisor> kernel_generators(const Order& o);

/// "2.0:1,2.1:-1" style rendering of a divisor.
std::string format_divisor(const Order& o, const Divisor& d);
/// Parses "place:coef,..."; an empty string is the zero divisor.
Divisor parse_divisor(const Order& o, std::string_view text, Level level);

struct ConductorVerdict {
    bool holds = true;
    std::optional<std::string> violator;
};

/// Conductor-ideal test for prod P^k over Õ.
ConductorVerdict is_conductor_ideal(const QuadField& f, const std::map<PlaceId, std::int64_t>& exponents);
ConductorVerdict is_conductor_ideal(const DeclaredField& f, const std::map<std::string, std::int64_t>& exponents);

/// Quadratic orders only come as Z + fÕ, so only a = fÕ is accepted.
Order order_from_ideal(const QuadField& f, const std::map<PlaceId, std::int64_t>& exponents);

struct FixReport {
    bool maximal = false;
    /// Unknown (nullopt) when the data do not determine the answer.
    std::optional<bool> conductor_squarefree;
    bool all_residue_f2 = true;
    bool all_r_geq_2 = true;
    std::optional<bool> all_hold;
    /// |(Õ/F)*| == 1, quadratic backend only.
    std::optional<bool> units_mod_conductor_trivial;
};

FixReport prop_fix_report(const Order& o);

/// |(Õ/fÕ)*| for the quadratic order Z + fÕ.
Integer units_mod_conductor(const Order& o);

/// Some a with div_O(a) = 0 and a not a unit of O, searched among units of
/// Õ and quotients beta/conj(beta) of generators of ideals of norm <= bound
/// supported on the conductor. Throws invalid_input when O is maximal.
std::optional<QElement> divisor_kernel_witness(const Order& o, const Integer& bound);

/// Whether alpha lies in Z + fÕ.
bool in_order(const Order& o, const QElement& alpha);

} // namespace chow
