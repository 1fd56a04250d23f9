#pragma once

// Chow groups of orders, the principal divisor test, Picard cardinalities
// and the search for quadratic orders with trivial Chow group.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chow/abgroup.hpp"
#include "chow/orders.hpp"
#include "chow/quadfield.hpp"

namespace chow {

/// G = (+) Z p_i (+) Cl/N modulo R. The user generators of `result` are the
/// non-invertible primes p_1..p_r followed by the invariant generators of Cl.
struct ChowPresentation {
    Order order;
    AbelianGroup class_group;
    /// Labels of the user generators of `result`.
    std::vector<std::string> generator_labels;
    /// Classes in Cl of the kernel generators, in kernel_generators() order.
    std::vector<GroupElement> n_generators;
    /// [Q_i] in Cl.
    std::vector<GroupElement> q_classes;
    /// Rows (g_i p_i, -[Q_i]) over the user generators.
    IntMatrix r_relations;
    AbelianGroup result;

    /// Class of an order-level divisor.
    GroupElement project(const Divisor& d) const;
    /// Class of f_*(d) for a divisor over the normalization.
    GroupElement project_normalization(const Divisor& d) const;
    /// User-generator coordinates of an order-level divisor.
    std::vector<Integer> coordinates(const Divisor& d) const;
};

ChowPresentation chow_group(const Order& o);

struct ExactSequenceData {
    /// Cl/N, the image of Chow(Õ).
    AbelianGroup image_part;
    /// Z/g_i, one per non-invertible prime (trivial groups included).
    std::vector<AbelianGroup> local_parts;
    /// Invariant factors of image_part (+) local parts.
    std::vector<Integer> direct_sum_invariants;
    /// Invariant factors of Chow(O) differ from the direct sum.
    bool non_split = false;
};

ExactSequenceData exact_sequence_data(const ChowPresentation& c);
ExactSequenceData exact_sequence_data(const Order& o);

enum class PrincipalKind { generator, principal_without_generator, not_principal };

struct PrincipalResult {
    PrincipalKind kind = PrincipalKind::not_principal;
    std::optional<QElement> alpha;
    /// 1 or 5 for not_principal.
    int failed_step = 0;
};

/// Decides whether an order-level divisor is principal. Throws
/// bound_exceeded when is_principal runs past step_limit.
PrincipalResult principal_divisor_test(const Order& o, const Divisor& d,
                                       std::size_t step_limit = default_step_limit);

/// Ideal prod P^c of the maximal order for a divisor over the normalization.
QIdeal divisor_ideal(const QuadField& f, const Divisor& d);

struct PicReport {
    Integer cl_cardinality;
    /// [Õ* : O*]
    Integer unit_index;
    /// |(Õ/F)*| and |(O/F)*| = |(Z/fZ)*|.
    Integer units_mod_conductor;
    Integer units_mod_conductor_below;
    /// |(Õ/F)*| / |(O/F)*|
    Integer relative_unit_quotient;
    Integer pic_cardinality;
};

/// Quadratic backend only.
PicReport pic_cardinality(const Order& o);

/// [Õ* : O*] for Z + fÕ.
Integer unit_index(const Order& o);

struct PicChowReport {
    bool surjective = true;
    std::optional<bool> injective;
    std::vector<std::string> reasons;
};

PicChowReport pic_chow_report(const Order& o);
PicChowReport pic_chow_report(const ChowPresentation& c);

struct TrivialChowSearch {
    std::optional<Integer> conductor;
    std::vector<std::int64_t> primes;
    std::int64_t budget = 0;
};

/// Smallest conductor f whose prime factors are at most budget with
/// Chow(Z + fÕ) trivial; the result has been re-verified.
TrivialChowSearch find_trivial_chow_conductor(const QuadField& f, std::int64_t budget);

/// The induced map Chow(source) -> Chow(target) for target contained in source.
struct ChowMap {
    AbelianGroup source;
    AbelianGroup target;
    /// Images of the user generators of source, in target coordinates.
    std::vector<GroupElement> generator_images;
    AbelianGroup cokernel;
    Integer image_order;
    Integer kernel_order;
    bool injective = false;
    bool surjective = false;
};

/// Throws invalid_input unless the target is contained in the source (same
/// field or file, conductor primes below those of the source).
ChowMap chow_map(const Order& source, const Order& target);

} // namespace chow
