#pragma once

// Independent counts of classes of primitive binary quadratic forms
// (a, b, c) of discriminant b^2 - 4ac, used as oracles for class numbers of
// maximal and non-maximal quadratic orders.

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

namespace oracle {

inline std::int64_t isqrt(std::int64_t n) {
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline bool primitive(std::int64_t a, std::int64_t b, std::int64_t c) {
    return std::gcd(std::gcd(a, b), c) == 1;
}

/// Reduced primitive positive definite forms of discriminant delta < 0.
inline long definite_class_number(std::int64_t delta) {
    long h = 0;
    const std::int64_t n = -delta;
    for (std::int64_t a = 1; 3 * a * a <= n; ++a)
        for (std::int64_t b = -a + 1; b <= a; ++b) {
            std::int64_t num = b * b - delta;
            if (num % (4 * a) != 0) continue;
            std::int64_t c = num / (4 * a);
            if (c < a) continue;
            if (c == a && b < 0) continue;
            if (primitive(a, b, c)) ++h;
        }
    return h;
}

/// Cycles of reduced primitive indefinite forms of non-square discriminant
/// delta > 0, with a cycle and its negative counted once.
inline long indefinite_class_number(std::int64_t delta) {
    const std::int64_t s = isqrt(delta);
    using Form = std::tuple<std::int64_t, std::int64_t, std::int64_t>;
    auto reduced = [&](std::int64_t a, std::int64_t b) {
        std::int64_t aa = 2 * std::abs(a);
        if (b <= 0 || b * b >= delta) return false;
        if ((aa + b) * (aa + b) <= delta) return false;
        return aa - b < 0 || (aa - b) * (aa - b) < delta;
    };
    std::set<Form> forms;
    for (std::int64_t b = 1; b <= s; ++b) {
        if ((delta - b * b) % 4 != 0) continue;
        std::int64_t m = (delta - b * b) / 4;
        for (std::int64_t a = 1; a <= m && a <= s; ++a) {
            if (m % a != 0) continue;
            for (std::int64_t sa : {a, -a}) {
                std::int64_t c = -m / sa;
                if (reduced(sa, b) && primitive(sa, b, c)) forms.insert({sa, b, c});
            }
        }
    }
    std::map<Form, long> cycle_of;
    long cycles = 0;
    for (const auto& start : forms) {
        if (cycle_of.count(start)) continue;
        Form f = start;
        while (!cycle_of.count(f)) {
            cycle_of[f] = cycles;
            auto [a, b, c] = f;
            std::int64_t cc = 2 * std::abs(c);
            std::int64_t b2 = s - (((s + b) % cc) + cc) % cc;
            std::int64_t c2 = (b2 * b2 - delta) / (4 * c);
            f = {c, b2, c2};
        }
        ++cycles;
    }
    // Wide classes: a cycle and the cycle of (-a, b, -c) are identified.
    std::set<std::pair<long, long>> wide;
    for (const auto& [f, id] : cycle_of) {
        auto [a, b, c] = f;
        long other = cycle_of.at(Form{-a, b, -c});
        wide.insert({std::min(id, other), std::max(id, other)});
    }
    return static_cast<long>(wide.size());
}

/// Class number of the quadratic order of discriminant delta.
inline long class_number(std::int64_t delta) {
    return delta < 0 ? definite_class_number(delta) : indefinite_class_number(delta);
}

} // namespace oracle
