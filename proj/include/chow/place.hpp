#pragma once

#include <compare>
#include <cstdint>

namespace chow {

/// Maximal ideal identified by the rational prime below it and a branch
/// index among the ideals over that prime. Ordering is (prime, branch).
struct PlaceId {
    std::int64_t prime = 0;
    int branch = 0;

    friend auto operator<=>(const PlaceId&, const PlaceId&) = default;
};

} // namespace chow
