#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tsg/arith.hpp"
#include "test_util.hpp"

using namespace tsg;

TEST_CASE("rational parse/format round trip") {
    CHECK(format_rational(parse_rational("3/8")) == "3/8");
    CHECK(format_rational(parse_rational("-3/6")) == "-1/2");
    CHECK(format_rational(parse_rational("7")) == "7");
    CHECK(parse_rational("2/5") == Rational(2) / 5);
    CHECK_THROWS_AS(parse_rational("x"), Error);
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
}

TEST_CASE("rmod and rfloor") {
    CHECK(rfloor(Rational(7) / 3) == 2);
    CHECK(rfloor(Rational(-7) / 3) == -3);
    CHECK(rfloor(Rational(-6) / 3) == -2);
    CHECK(rmod(Rational(7) / 3, 1) == Rational(1) / 3);
    CHECK(rmod(Rational(-1) / 3, 1) == Rational(2) / 3);
    CHECK(rmod(Rational(5), Rational(5)) == 0);
    CHECK(rmod(Rational(-10), Rational(5)) == 0);
}

TEST_CASE("factorize") {
    CHECK(factorize(1).exps.empty());
    ExponentVector tw = factorize(12);
    CHECK(tw.exps == std::map<Integer, Integer>{{2, 2}, {3, 1}});
    CHECK(factorize(30).exps == std::map<Integer, Integer>{{2, 1}, {3, 1}, {5, 1}});
    CHECK(factorize_rational(Rational(2) / 3).exps == std::map<Integer, Integer>{{2, 1}, {3, -1}});
    CHECK(factorize(97).exps == std::map<Integer, Integer>{{97, 1}});
    for (int n = 1; n <= 200; ++n) CHECK(factorize(n).value() == n);
}

TEST_CASE("check_independent") {
    CHECK(check_independent({2, 3}));
    CHECK_FALSE(check_independent({2, 4}));
    CHECK_FALSE(check_independent({2, 3, 6}));
    CHECK(check_independent({2, 3, 5}));
    CHECK(check_independent({4, 7}));
    CHECK_FALSE(check_independent({4, 8})); // 4^3 = 8^2
}

TEST_CASE("group context derived data") {
    GroupContext c23(1, {2, 3});
    CHECK(c23.m == 6);
    CHECK(c23.d == 1);
    GroupContext c35(1, {3, 5});
    CHECK(c35.m == 15);
    CHECK(c35.d == 2);
    GroupContext c47(1, {4, 7});
    CHECK(c47.m == 28);
    CHECK(c47.d == 3);
    CHECK_THROWS_AS(GroupContext(1, {2, 4}), Error);
    CHECK_THROWS_AS(GroupContext(1, {3, 2}), Error);
    CHECK_THROWS_AS(GroupContext(0, {2}), Error);
}

TEST_CASE("slope_decompose spec examples") {
    GroupContext ctx(1, {2, 3});
    auto s = slope_decompose(6, ctx);
    REQUIRE(s);
    CHECK(*s == std::vector<Integer>{1, 1});
    CHECK_FALSE(slope_decompose(5, ctx));
    auto t = slope_decompose(Rational(2) / 3, ctx);
    REQUIRE(t);
    CHECK(*t == std::vector<Integer>{1, -1});
    auto one = slope_decompose(1, ctx);
    REQUIRE(one);
    CHECK(*one == std::vector<Integer>{0, 0});
    // 12 = 2^2 * 3: solvable over (2,3) but e.g. 18/4 also
    auto u = slope_decompose(Rational(9) / 2, ctx);
    REQUIRE(u);
    CHECK(*u == std::vector<Integer>{-1, 2});
}

TEST_CASE("slope_decompose round trip property") {
    tsgtest::Rng rng(0x5eedULL);
    GroupContext ctx(1, {2, 3, 5});
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<Integer> s = {rng.range(-8, 8), rng.range(-8, 8), rng.range(-8, 8)};
        Rational q = 1;
        for (std::size_t i = 0; i < 3; ++i) {
            ExponentVector ev = factorize(ctx.basis[i]);
            q *= ev.pow(s[i]).value();
        }
        auto back = slope_decompose(q, ctx);
        REQUIRE(back);
        CHECK(*back == s);
    }
}

TEST_CASE("in_ring spec examples") {
    CHECK(in_ring(Rational(3) / 8, Integer(2)));
    CHECK_FALSE(in_ring(Rational(2) / 5, Integer(6)));
    CHECK(in_ring(Rational(7), Integer(3)));
    CHECK(in_ring(Rational(5) / 12, Integer(6)));
    CHECK_FALSE(in_ring(Rational(1) / 10, Integer(6)));
}

TEST_CASE("in_dA spec examples") {
    GroupContext c35(1, {3, 5});
    CHECK(in_dA(0, c35));
    CHECK_FALSE(in_dA(1, c35));
    CHECK(in_dA(2, c35));
    CHECK(in_dA(Rational(2) / 15, c35));
    GroupContext c2(1, {2});
    CHECK(in_dA((1 - Rational(2)) * Rational(3) / 8, c2));
}

TEST_CASE("(1-Lambda)A = dA sampling, both directions") {
    tsgtest::Rng rng(0xdadaULL);
    GroupContext ctx(1, {3, 5});
    for (int iter = 0; iter < 300; ++iter) {
        Rational a = tsgtest::random_ring_element(rng, ctx.m);
        Rational lam = tsgtest::random_lambda_element(rng, ctx.basis, 4);
        CHECK(in_dA((1 - lam) * a, ctx)); // Step 1: (1-Lambda)A inside dA
        CHECK(in_dA(Rational(ctx.d) * a, ctx)); // Step 2: dA inside (1-Lambda)A, via x/d in A
    }
}

TEST_CASE("bezout") {
    auto [g1, c1] = bezout({2, 4});
    CHECK(g1 == 2);
    CHECK(c1[0] * 2 + c1[1] * 4 == 2);
    auto [g2, c2] = bezout({3, 5});
    CHECK(g2 == 1);
    CHECK(c2[0] * 3 + c2[1] * 5 == 1);
    auto [g3, c3] = bezout({1, 2});
    CHECK(g3 == 1);
    CHECK(c3[0] * 1 + c3[1] * 2 == 1);
    auto [g4, c4] = bezout({-6, 10, 15});
    CHECK(g4 == 1);
    CHECK(c4[0] * -6 + c4[1] * 10 + c4[2] * 15 == 1);
    CHECK_THROWS_AS(bezout({0, 0}), Error);
    CHECK_THROWS_AS(bezout({}), Error);
}

TEST_CASE("find_pi spec examples") {
    {
        GroupContext ctx(1, {2, 3});
        auto res = find_pi(ctx);
        CHECK(res.Pi == 6);
        CHECK(res.alphas == std::vector<Integer>{1, 1});
    }
    {
        GroupContext ctx(1, {3, 5});
        auto res = find_pi(ctx);
        CHECK(res.Pi == 15);
        CHECK(res.alphas == std::vector<Integer>{1, 1});
    }
    {
        GroupContext ctx(1, {4, 7});
        auto res = find_pi(ctx);
        CHECK(res.Pi == 112);
        CHECK(res.alphas == std::vector<Integer>{2, 1});
        CHECK(igcd((res.Pi - 1) / ctx.d, ctx.d) == 1);
    }
    {
        GroupContext ctx(1, {2, 3, 5});
        auto res = find_pi(ctx);
        CHECK(res.Pi == 30);
    }
}

TEST_CASE("find_pi postconditions over many bases") {
    std::vector<std::vector<Integer>> bases = {{2},    {3},    {2, 3},  {3, 5},   {2, 3, 5},
                                              {4, 7}, {5, 9}, {7, 13}, {4, 7, 9}, {10, 13}};
    for (const auto& b : bases) {
        if (!check_independent(b)) continue;
        GroupContext ctx(1, b);
        auto res = find_pi(ctx);
        Integer check = 1;
        for (std::size_t i = 0; i < b.size(); ++i) {
            CHECK(res.alphas[i] >= 1);
            check *= boost::multiprecision::pow(b[i], static_cast<unsigned>(res.alphas[i]));
        }
        CHECK(check == res.Pi);
        CHECK((res.Pi - 1) % ctx.d == 0);
        CHECK(igcd((res.Pi - 1) / ctx.d, ctx.d) == 1);
    }
}
