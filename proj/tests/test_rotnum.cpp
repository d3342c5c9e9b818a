#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tsg/rotnum.hpp"
#include "test_util.hpp"

using namespace tsg;

namespace {

PLCircleMap ghys_map() {
    return PLCircleMap::from_pieces(1, {{Rational(0), Rational(2)}, {Rational(2) / 5, Rational(1) / 3}},
                                    Rational(1) / 5);
}

Rational decimal(const std::string& s) {
    auto dot = s.find('.');
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t firstNonZero = digits.find_first_not_of('0');
    digits = (firstNonZero == std::string::npos) ? "0" : digits.substr(firstNonZero);
    Integer den = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(s.size() - dot - 1));
    return Rational(Integer(digits)) / Rational(den);
}

// oracle: log2/log6 to 30 digits (independent high-precision evaluation)
const Rational LOG2_OVER_LOG6 = decimal("0.386852807234541586870246138468");

} // namespace

TEST_CASE("displacement_extrema spec examples") {
    PLCircleMap r13 = PLCircleMap::rotation(1, Rational(1) / 3);
    auto [mn0, mx0] = displacement_extrema(r13, 0, 3);
    CHECK(mn0 == 1);
    CHECK(mx0 == 1);
    auto [mn1, mx1] = displacement_extrema(r13, 1, 3);
    CHECK(mn1 == 0);
    CHECK(mx1 == 0);
    auto [mn2, mx2] = displacement_extrema(ghys_map(), 0, 1);
    CHECK(mn2 > 0);
}

TEST_CASE("compare_rho spec examples") {
    CHECK(compare_rho(PLCircleMap::rotation(1, Rational(1) / 2), 1, 2) == Ordering::Equal);
    CHECK(compare_rho(PLCircleMap::rotation(1, Rational(1) / 3), 1, 2) == Ordering::Less);
    CHECK(compare_rho(ghys_map(), 1, 3) == Ordering::Greater);
}

TEST_CASE("exact_rational_rho basics") {
    auto r = exact_rational_rho(PLCircleMap::rotation(1, Rational(2) / 5));
    REQUIRE(r);
    CHECK(*r == RationalRho{2, 5});
    auto id = exact_rational_rho(PLCircleMap::identity(1));
    REQUIRE(id);
    CHECK(*id == RationalRho{0, 1});
    auto r2 = exact_rational_rho(PLCircleMap::rotation(2, 1));
    REQUIRE(r2);
    CHECK(*r2 == RationalRho{1, 2});
    auto deep = exact_rational_rho(PLCircleMap::rotation(1, Rational(13) / 64));
    REQUIRE(deep);
    CHECK(*deep == RationalRho{13, 64});
}

TEST_CASE("exact_rational_rho of the Ghys map is absent at depth 40") {
    CHECK_FALSE(exact_rational_rho(ghys_map(), 40));
}

TEST_CASE("rho_bounds") {
    auto id = rho_bounds(PLCircleMap::identity(1), 50);
    CHECK(id.contains(0));
    auto r13 = rho_bounds(PLCircleMap::rotation(1, Rational(1) / 3), 100);
    CHECK(r13.contains(Rational(1) / 3));
    CHECK(r13.width() == Rational(2) / 100);
    auto g = rho_bounds(ghys_map(), 10000);
    CHECK(g.width() == Rational(2) / 10000);
    CHECK(g.contains(LOG2_OVER_LOG6));
}

TEST_CASE("sandwich: exact rho lies in rho_bounds") {
    tsgtest::Rng rng(0x77aaULL);
    for (int i = 0; i < 10; ++i) {
        Rational a = Rational(rng.range(0, 40)) / 41;
        PLCircleMap f = PLCircleMap::rotation(1, a);
        auto r = exact_rational_rho(f);
        REQUIRE(r);
        CHECK(rho_bounds(f, 1000).contains(r->value()));
    }
}

TEST_CASE("periodic_point") {
    auto x = periodic_point(PLCircleMap::rotation(1, Rational(1) / 2), 1, 2);
    REQUIRE(x);
    CHECK(*x == 0);
    auto y = periodic_point(PLCircleMap::identity(1), 0, 1);
    REQUIRE(y);
    CHECK(*y == 0);
    auto z = periodic_point(PLCircleMap::rotation(2, 1), 1, 2);
    REQUIRE(z);
    CHECK(*z == 0);
    CHECK_FALSE(periodic_point(PLCircleMap::rotation(1, Rational(1) / 3), 1, 2));
    // verification identity
    PLCircleMap f = PLCircleMap::rotation(1, Rational(3) / 7);
    auto w = periodic_point(f, 3, 7);
    REQUIRE(w);
    Rational lift = *w;
    for (int i = 0; i < 7; ++i) lift = f.evaluate(lift); // true lift of f^7
    CHECK(lift == *w + 3);
}

TEST_CASE("order_of") {
    auto a = order_of(PLCircleMap::rotation(2, 1), 10);
    REQUIRE(a);
    CHECK(*a == 2);
    auto b = order_of(PLCircleMap::identity(1), 10);
    REQUIRE(b);
    CHECK(*b == 1);
    CHECK_FALSE(order_of(ghys_map(), 50));
}

TEST_CASE("solver agrees with the literal power-based comparison") {
    tsgtest::Rng rng(0x9c9cULL);
    std::vector<PLCircleMap> gens = {
        PLCircleMap::rotation(1, Rational(1) / 2),
        PLCircleMap::from_pieces(
            1, {{Rational(0), Rational(2)}, {Rational(1) / 4, Rational(1) / 2}, {Rational(3) / 4, Rational(1)}},
            Rational(1) / 4)};
    for (int i = 0; i < 15; ++i) {
        PLCircleMap w = PLCircleMap::identity(1);
        int len = static_cast<int>(rng.below(5));
        for (int j = 0; j < len; ++j) {
            std::size_t idx = rng.below(gens.size());
            w = compose(w, rng.below(2) ? invert(gens[idx]) : gens[idx]);
        }
        RotationSolver solver(w);
        for (Integer q = 1; q <= 8; ++q) {
            for (Integer p = 0; p <= q; ++p) {
                auto got = solver.compare(p, q);
                REQUIRE(got);
                CHECK(*got == compare_rho(w, p, q));
            }
        }
    }
}

TEST_CASE("power law and conjugation invariance") {
    tsgtest::Rng rng(0xfeedULL);
    PLCircleMap h = PLCircleMap::from_pieces(
        1, {{Rational(0), Rational(2)}, {Rational(1) / 4, Rational(1) / 2}, {Rational(3) / 4, Rational(1)}},
        Rational(1) / 4);
    for (int i = 0; i < 8; ++i) {
        Rational a = Rational(rng.range(0, 11)) / 12;
        PLCircleMap f = PLCircleMap::rotation(1, a);
        auto base = exact_rational_rho(f);
        REQUIRE(base);
        for (int k = 2; k <= 4; ++k) {
            auto pk = exact_rational_rho(power(f, k));
            REQUIRE(pk);
            CHECK(pk->value() == rmod(Rational(k) * base->value(), 1));
        }
        auto conj = exact_rational_rho(compose(h, compose(f, invert(h))));
        REQUIRE(conj);
        CHECK(*conj == *base);
    }
}

TEST_CASE("canonical_log_ratio") {
    auto a = canonical_log_ratio(2, 6);
    REQUIRE(std::holds_alternative<LogRatio>(a));
    CHECK(std::get<LogRatio>(a).alpha == factorize(2));
    CHECK(std::get<LogRatio>(a).beta == factorize(6));
    // value reduced mod 1: log(12)/log(6) = 1 + log2/log6
    auto b = canonical_log_ratio(12, 6);
    REQUIRE(std::holds_alternative<LogRatio>(b));
    CHECK(std::get<LogRatio>(b) == std::get<LogRatio>(a));
    // beta < 1 flips both
    auto c = canonical_log_ratio(Rational(1) / 2, Rational(1) / 6);
    REQUIRE(std::holds_alternative<LogRatio>(c));
    CHECK(std::get<LogRatio>(c) == std::get<LogRatio>(a));
    // collapse to rational
    auto d = canonical_log_ratio(36, 6);
    REQUIRE(std::holds_alternative<RationalRho>(d));
    CHECK(std::get<RationalRho>(d) == RationalRho{0, 1});
    CHECK_THROWS_AS(canonical_log_ratio(2, 1), Error);
    // numeric value against the oracle
    // the certified interval is tighter than the 30-digit oracle, so compare with slack
    Interval v = std::get<LogRatio>(a).value_interval(128);
    Rational tol = Rational(1) / boost::multiprecision::pow(Integer(10), 28);
    CHECK(v.lo_rational() < LOG2_OVER_LOG6 + tol);
    CHECK(v.hi_rational() > LOG2_OVER_LOG6 - tol);
    CHECK(v.width_le_pow2(100));
}

TEST_CASE("same_log_ratio rescaling") {
    LogRatio a{factorize(2), factorize(6)};
    LogRatio b{factorize(4), factorize(36)}; // squares: same value
    CHECK(same_log_ratio(a, b));
    LogRatio c{factorize(3), factorize(6)};
    CHECK_FALSE(same_log_ratio(a, c));
}

TEST_CASE("madic_profile") {
    GroupContext c2(1, {2});
    auto idp = madic_profile(PLCircleMap::identity(1), c2, 5);
    for (const auto& e : idp.entries) {
        CHECK(e.M == 0);
        CHECK(e.N == 0);
    }
    auto half = madic_profile(PLCircleMap::rotation(1, Rational(1) / 2), c2, 6);
    for (std::size_t k = 0; k < half.entries.size(); ++k) {
        if (k % 2 == 0) {
            CHECK(half.entries[k].M == 0);
            CHECK(half.entries[k].N == 0);
        } else {
            CHECK(half.entries[k].M == 1);
            CHECK(half.entries[k].N == 1);
        }
    }
    GroupContext c23(1, {2, 3});
    CHECK_THROWS_AS(madic_profile(ghys_map(), GroupContext(1, {6}), 3), Error); // break 2/5 not 6-adic
    CHECK_THROWS_AS(madic_profile(PLCircleMap::identity(1), c23, 3), Error);    // two generators
}

TEST_CASE("certified interval mod-1 containment") {
    CertifiedInterval iv{Rational(99) / 100, Rational(101) / 100};
    CHECK(iv.contains(Rational(995) / 1000));
    CHECK(iv.contains(Rational(5) / 1000)); // wraps past 0
    CHECK_FALSE(iv.contains(Rational(1) / 2));
}
