#pragma once

// Exact integer linear algebra and finitely generated abelian groups.
//
// Every quotient computation in the library goes through the Smith normal
// form below: class groups of quadratic fields, the kernel subgroup N of
// the push-forward, and the final Chow group presentation.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace chow {

using Integer = mpz_class;

/// Dense row-major matrix over the integers.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols);
    IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

    static IntMatrix identity(std::size_t n);
    static IntMatrix from_rows(std::span<const std::vector<Integer>> rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<Integer> row(std::size_t i) const;
    void append_row(std::span<const Integer> r);

    IntMatrix transpose() const;

    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
    friend bool operator==(const IntMatrix& a, const IntMatrix& b) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Integer> data_;
};

std::vector<Integer> operator*(std::span<const Integer> x, const IntMatrix& m);

/// Result of smith_normal_form: left * A * right == diagonal, with
/// right * right_inverse == identity.
struct SmithForm {
    IntMatrix diagonal;
    IntMatrix left;
    IntMatrix right;
    IntMatrix right_inverse;
};

/// Smith normal form with smallest-absolute-value pivoting (ties broken by
/// row then column index). Diagonal entries are non-negative and satisfy
/// d_1 | d_2 | ...; zero entries come last.
SmithForm smith_normal_form(const IntMatrix& a);

/// Element of an AbelianGroup in invariant-factor coordinates.
struct GroupElement {
    std::vector<Integer> coords;
    friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

/// Finitely generated abelian group Z/d_1 x ... x Z/d_k with d_i | d_{i+1}
/// among the finite factors, free factors (d_i = 0) last and no d_i = 1.
///
/// The group remembers the presentation it came from: `basis_change` maps a
/// row vector of coordinates on the presentation ("user") generators to
/// invariant coordinates, and `generators` holds each invariant generator as
/// a row vector in user coordinates.
class AbelianGroup {
public:
    AbelianGroup() = default;

    /// Trivial group on `user_rank` user generators (all of them zero).
    static AbelianGroup trivial(std::size_t user_rank = 0);
    /// Z/d_1 x ... with identity presentation; `invariants` must already be
    /// in canonical form.
    static AbelianGroup from_invariants(std::vector<Integer> invariants,
                                        std::vector<std::string> labels = {});

    const std::vector<Integer>& invariants() const { return invariants_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const IntMatrix& basis_change() const { return basis_change_; }
    const IntMatrix& generators() const { return generators_; }

    std::size_t rank() const { return invariants_.size(); }
    std::size_t user_rank() const { return basis_change_.rows(); }
    bool is_trivial() const { return invariants_.empty(); }
    bool is_finite() const;
    /// Cardinality; 0 for infinite groups.
    Integer order() const;

    GroupElement zero() const;
    GroupElement reduce(std::vector<Integer> coords) const;
    GroupElement add(const GroupElement& a, const GroupElement& b) const;
    GroupElement negate(const GroupElement& a) const;
    GroupElement scale(const GroupElement& a, const Integer& k) const;
    GroupElement generator(std::size_t i) const;
    bool contains(const GroupElement& a) const;

    /// Coordinates on the user generators of some preimage of `a`.
    std::vector<Integer> lift(const GroupElement& a) const;

    /// "trivial", "Z/4", "Z x Z/2 x Z/6", ...
    std::string to_string() const;

private:
    friend AbelianGroup quotient(std::size_t, const IntMatrix&, std::vector<std::string>);

    std::vector<Integer> invariants_;
    std::vector<std::string> labels_;
    IntMatrix basis_change_;
    IntMatrix generators_;
};

std::string invariants_to_string(std::span<const Integer> invariants);

/// Cokernel of `relations` (one relation per row, n_generators columns).
AbelianGroup quotient(std::size_t n_generators, const IntMatrix& relations,
                      std::vector<std::string> labels = {});

/// G / <subgen>. The user generators of the result are the invariant
/// generators of G, so basis_change is the projection G -> G/<subgen>.
AbelianGroup subgroup_quotient(const AbelianGroup& g, std::span<const GroupElement> subgen);

/// Reduce a vector of user-generator coordinates into G.
GroupElement member(const AbelianGroup& g, std::span<const Integer> x);

/// Least n >= 1 with n*e = 0; nullopt when e has infinite order.
std::optional<Integer> element_order(const AbelianGroup& g, const GroupElement& e);

/// Integer coefficients t with sum t_k gens[k] == target in G, if any.
std::optional<std::vector<Integer>> solve_in_span(const AbelianGroup& g,
                                                  std::span<const GroupElement> gens,
                                                  const GroupElement& target);

struct Bezout {
    Integer gcd;
    std::vector<Integer> coefficients;
};

/// gcd of `values` with coefficients from a left-fold extended Euclid.
/// Throws std::invalid_argument when all values are zero or the list is empty.
Bezout bezout_gcd(std::span<const Integer> values);

} // namespace chow
