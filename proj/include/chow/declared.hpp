#pragma once

// Declared field data: class-group invariants of Õ and the splitting of the
// conductor primes, read from a JSON document of the form
//
//   { "description": "...",
//     "class_invariants": [2],
//     "conductor_primes": [
//       { "p": 2, "residue_size_below": 2,
//         "places": [ { "label": "P", "degree": 2, "ramification": 1,
//                       "class_image": [1] } ] } ] }
//
// Each conductor-prime record describes one non-invertible prime of some
// order; a selection of records carves an order out of the file. A
// class_image of null marks data that is not known.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chow/abgroup.hpp"
#include "chow/place.hpp"

namespace chow {

struct DeclaredPlace {
    std::string label;
    int degree = 1;
    int ramification = 1;
    std::optional<std::vector<Integer>> class_image;
};

struct DeclaredPrime {
    std::int64_t p = 0;
    Integer residue_size_below;
    std::vector<DeclaredPlace> places;
};

/// A place of Õ as seen across all records of the file.
struct DeclaredLabel {
    std::string label;
    std::int64_t p = 0;
    PlaceId id;
    Integer absolute_residue;
    int ramification = 1;
    std::optional<std::vector<Integer>> class_image;
};

struct DeclaredField {
    std::string description;
    std::vector<Integer> class_invariants;
    std::vector<DeclaredPrime> conductor_primes;

    /// Distinct places in file order; filled by parse_declared.
    std::vector<DeclaredLabel> labels;

    bool complete() const;
    const DeclaredLabel* find(std::string_view label) const;
    const DeclaredLabel* find(PlaceId id) const;
};

/// Throws data_error with line/column for syntax errors and a JSON pointer
/// plus the violated invariant for semantic errors.
DeclaredField parse_declared(std::string_view text);
DeclaredField load_declared(const std::string& path);
std::string serialize_declared(const DeclaredField& f);

/// "none", "all" (alias "main") or comma-separated record indices.
std::vector<std::size_t> parse_selection(std::string_view text, const DeclaredField& f);

} // namespace chow
