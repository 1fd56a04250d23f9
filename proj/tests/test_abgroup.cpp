#include <algorithm>
#include <random>

#include "chow/abgroup.hpp"
#include "doctest.h"
#include "minors.hpp"

using namespace chow;

namespace {

IntMatrix random_matrix(std::mt19937& rng, std::size_t m, std::size_t n, int range) {
    std::uniform_int_distribution<int> dist(-range, range);
    IntMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = dist(rng);
    return a;
}

} // namespace

TEST_CASE("smith form of a fixed matrix") {
    IntMatrix a{{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}};
    auto s = smith_normal_form(a);
    CHECK(s.diagonal(0, 0) == 2);
    CHECK(s.diagonal(1, 1) == 6);
    CHECK(s.diagonal(2, 2) == 12);
    CHECK(s.left * a * s.right == s.diagonal);
    CHECK(s.right * s.right_inverse == IntMatrix::identity(3));
}

TEST_CASE("smith form agrees with determinantal divisors on random matrices") {
    std::mt19937 rng(12345);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t m = 1 + rng() % 5, n = 1 + rng() % 5;
        IntMatrix a = random_matrix(rng, m, n, 6);
        auto s = smith_normal_form(a);
        REQUIRE(s.left * a * s.right == s.diagonal);
        REQUIRE(s.right * s.right_inverse == IntMatrix::identity(n));
        CHECK(abs(oracle::det(s.left)) == 1);
        std::vector<Integer> diag;
        for (std::size_t i = 0; i < std::min(m, n); ++i)
            if (s.diagonal(i, i) != 0) diag.push_back(s.diagonal(i, i));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) REQUIRE(s.diagonal(i, j) == 0);
        CHECK(diag == oracle::determinantal_invariants(a));
    }
}

TEST_CASE("quotient drops unit factors and orders free part last") {
    IntMatrix rel{{2, 0, 0}, {0, 3, 0}};
    auto g = quotient(3, rel, {"a", "b", "c"});
    REQUIRE(g.invariants() == std::vector<Integer>{6, 0});
    CHECK(g.to_string() == "Z/6 x Z");
    CHECK(!g.is_finite());
    CHECK(g.order() == 0);
    auto e = member(g, std::vector<Integer>{1, 1, 0});
    CHECK(element_order(g, e) == Integer(6));
    CHECK(element_order(g, member(g, std::vector<Integer>{0, 0, 1})) == std::nullopt);
}

TEST_CASE("trivial and from_invariants") {
    CHECK(AbelianGroup::trivial(3).is_trivial());
    CHECK(AbelianGroup::trivial(3).to_string() == "trivial");
    auto g = AbelianGroup::from_invariants({2, 4});
    CHECK(g.order() == 8);
    CHECK_THROWS(AbelianGroup::from_invariants({4, 2}));
}

TEST_CASE("lift inverts member") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + rng() % 4;
        IntMatrix rel = random_matrix(rng, 1 + rng() % 4, n, 5);
        auto g = quotient(n, rel);
        for (std::size_t i = 0; i < g.rank(); ++i) {
            auto e = g.generator(i);
            CHECK(member(g, g.lift(e)) == e);
        }
        // relations map to zero
        for (std::size_t i = 0; i < rel.rows(); ++i) CHECK(member(g, rel.row(i)) == g.zero());
    }
}

TEST_CASE("subgroup quotient of Z/2 x Z/4") {
    auto g = AbelianGroup::from_invariants({2, 4});
    GroupElement h{{1, 2}};
    auto q = subgroup_quotient(g, std::span<const GroupElement>(&h, 1));
    CHECK(q.invariants() == std::vector<Integer>{4});
    CHECK(member(q, h.coords) == q.zero());
}

TEST_CASE("solve_in_span finds exact combinations") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 1 + rng() % 3;
        auto g = quotient(n, random_matrix(rng, 1 + rng() % 3, n, 6));
        std::vector<GroupElement> gens;
        for (int k = 0; k < 2; ++k) {
            std::vector<Integer> c(n);
            for (auto& x : c) x = static_cast<long>(rng() % 7) - 3;
            gens.push_back(member(g, c));
        }
        std::vector<Integer> t{static_cast<long>(rng() % 5), -static_cast<long>(rng() % 5)};
        auto target = g.add(g.scale(gens[0], t[0]), g.scale(gens[1], t[1]));
        auto sol = solve_in_span(g, gens, target);
        REQUIRE(sol.has_value());
        CHECK(g.add(g.scale(gens[0], (*sol)[0]), g.scale(gens[1], (*sol)[1])) == target);
    }
    auto z4 = AbelianGroup::from_invariants({4});
    GroupElement two{{2}}, one{{1}};
    CHECK(!solve_in_span(z4, std::span<const GroupElement>(&two, 1), one).has_value());
}

TEST_CASE("bezout left fold") {
    std::vector<Integer> a{2, 3};
    auto b = bezout_gcd(a);
    CHECK(b.gcd == 1);
    CHECK(b.coefficients == std::vector<Integer>{-1, 1});
    std::vector<Integer> c{2, 2};
    CHECK(bezout_gcd(c).coefficients == std::vector<Integer>{1, 0});
    std::vector<Integer> z{0, 0};
    CHECK_THROWS(bezout_gcd(z));
    std::mt19937 rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Integer> v;
        for (int k = 0; k < 4; ++k) v.emplace_back(static_cast<long>(rng() % 200) - 100);
        if (std::all_of(v.begin(), v.end(), [](const Integer& x) { return x == 0; })) continue;
        auto r = bezout_gcd(v);
        Integer s = 0, g = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            s += r.coefficients[i] * v[i];
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v[i].get_mpz_t());
        }
        CHECK(s == r.gcd);
        CHECK(r.gcd == g);
    }
}
