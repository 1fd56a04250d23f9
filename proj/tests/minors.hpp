#pragma once

// Invariant factors from determinantal divisors: d_k is the gcd of the
// k x k minors and the k-th invariant factor is d_k / d_{k-1}.

#include <algorithm>
#include <functional>
#include <vector>

#include "chow/abgroup.hpp"

namespace oracle {

using chow::IntMatrix;
using chow::Integer;

// Cofactor expansion; fine for the small sizes used here.
inline Integer det(const std::vector<std::vector<Integer>>& m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    if (n == 1) return m[0][0];
    Integer d = 0;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::vector<Integer>> sub;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<Integer> r;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) r.push_back(m[i][k]);
            sub.push_back(r);
        }
        Integer c = m[0][j] * det(sub);
        d += (j % 2 == 0) ? c : Integer(-c);
    }
    return d;
}

inline Integer det(const IntMatrix& a) {
    std::vector<std::vector<Integer>> m;
    for (std::size_t i = 0; i < a.rows(); ++i) m.push_back(a.row(i));
    return det(m);
}

inline void subsets(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out) {
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (cur.size() == k) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < n; ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
}

/// Nonzero invariant factors of a.
inline std::vector<Integer> determinantal_invariants(const IntMatrix& a) {
    std::vector<Integer> dk{1};
    const std::size_t r = std::min(a.rows(), a.cols());
    for (std::size_t k = 1; k <= r; ++k) {
        std::vector<std::vector<std::size_t>> rs, cs;
        subsets(a.rows(), k, rs);
        subsets(a.cols(), k, cs);
        Integer g = 0;
        for (const auto& ri : rs)
            for (const auto& ci : cs) {
                std::vector<std::vector<Integer>> m;
                for (auto i : ri) {
                    std::vector<Integer> row;
                    for (auto j : ci) row.push_back(a(i, j));
                    m.push_back(row);
                }
                Integer d = det(m);
                mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
            }
        if (g == 0) break;
        dk.push_back(g);
    }
    std::vector<Integer> inv;
    for (std::size_t k = 1; k < dk.size(); ++k) inv.push_back(dk[k] / dk[k - 1]);
    return inv;
}

} // namespace oracle
