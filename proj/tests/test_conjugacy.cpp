#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tsg/conjugacy.hpp"
#include "test_util.hpp"

using namespace tsg;

namespace {

PLCircleMap ghys_map() {
    return PLCircleMap::from_pieces(1, {{Rational(0), Rational(2)}, {Rational(2) / 5, Rational(1) / 3}},
                                    Rational(1) / 5);
}

/// Three-break map whose breaks form the periodic orbit 0 -> 1/4 -> 3/4 -> 0.
PLCircleMap cycle_map() {
    return PLCircleMap::from_pieces(
        1, {{Rational(0), Rational(2)}, {Rational(1) / 4, Rational(1) / 2}, {Rational(3) / 4, Rational(1)}},
        Rational(1) / 4);
}

/// Break 0 is a fixed point with non-trivial jump: the (D)-property fails.
PLCircleMap fixed_break_map() {
    return PLCircleMap::from_pieces(1, {{Rational(0), Rational(2)}, {Rational(1) / 3, Rational(1) / 2}}, 0);
}

Rational decimal(const std::string& s) {
    auto dot = s.find('.');
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t firstNonZero = digits.find_first_not_of('0');
    digits = (firstNonZero == std::string::npos) ? "0" : digits.substr(firstNonZero);
    Integer den = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(s.size() - dot - 1));
    return Rational(Integer(digits)) / Rational(den);
}

const Rational LOG2_OVER_LOG6 = decimal("0.386852807234541586870246138468");
// oracle: h_{1/6}(1/2) = (sqrt(1/6) - 1)/(1/6 - 1) to 20 digits
const Rational H_SIGMA_ORACLE = decimal("0.71010205144336438036");

} // namespace

TEST_CASE("jump_chain") {
    PLCircleMap g = ghys_map();
    CHECK(jump_chain(g, 1, 0) == 6);
    CHECK(jump_chain(g, 1, Rational(2) / 5) == Rational(1) / 6);
    CHECK(jump_chain(g, 2, Rational(2) / 5) == 1); // passes through 0 on the way
    CHECK(jump_chain(g, 2, 0) == 6);               // f(0) = 1/5 is not a break
    // cocycle consistency against the composed map
    CHECK(jump_chain(g, 3, Rational(2) / 5) == power(g, 3).jump_at(Rational(2) / 5));
}

TEST_CASE("orbit_partition") {
    CHECK(orbit_partition(PLCircleMap::identity(1)).classes.empty());
    CHECK(orbit_partition(PLCircleMap::rotation(1, Rational(1) / 3)).classes.empty());

    auto g = orbit_partition(ghys_map());
    REQUIRE(g.classes.size() == 1);
    CHECK(g.classes[0].anchor == Rational(2) / 5);
    CHECK(g.classes[0].iterates == std::vector<Rational>{Rational(2) / 5, Rational(0)});
    CHECK(g.classes[0].l == 1);
    CHECK(g.classes[0].jumpProduct == 1);
    CHECK_FALSE(g.classes[0].closed);
    CHECK(g.status == PartitionStatus::Complete);

    auto c = orbit_partition(cycle_map());
    REQUIRE(c.classes.size() == 1);
    CHECK(c.classes[0].closed);
    CHECK(c.classes[0].anchor == 0);
    CHECK(c.classes[0].l == 2);
    CHECK(c.classes[0].iterates == std::vector<Rational>{0, Rational(1) / 4, Rational(3) / 4});
    CHECK(c.classes[0].jumpProduct == 1);

    auto fx = orbit_partition(fixed_break_map());
    REQUIRE(fx.classes.size() == 2);
    CHECK(fx.classes[1].anchor == 0); // cycle classes come after chains
    CHECK(fx.classes[1].closed);
    CHECK(fx.classes[1].jumpProduct == 4);
    CHECK(fx.classes[0].anchor == Rational(1) / 3);
    CHECK(fx.classes[0].jumpProduct == Rational(1) / 4);
}

TEST_CASE("has_D_property") {
    CHECK(has_D_property(PLCircleMap::identity(1)).kind == DVerdict::Kind::Yes);
    CHECK(has_D_property(ghys_map()).kind == DVerdict::Kind::Yes);
    CHECK(has_D_property(cycle_map()).kind == DVerdict::Kind::Yes);

    auto no = has_D_property(fixed_break_map());
    CHECK(no.kind == DVerdict::Kind::No);
    REQUIRE(no.witnessClass);
    CHECK(no.partition.classes[*no.witnessClass].jumpProduct != 1);

    // same slopes but break orbits that stay disjoint: undecided at the bound
    PLCircleMap drift =
        PLCircleMap::from_pieces(1, {{Rational(0), Rational(2)}, {Rational(1) / 3, Rational(1) / 2}}, Rational(2) / 61);
    auto un = has_D_property(drift, 64);
    CHECK(un.kind == DVerdict::Kind::Unknown);
    CHECK(un.bound == 64);
    CHECK(un.partition.status == PartitionStatus::TruncatedAtBound);
}

TEST_CASE("pi_invariant") {
    PLCircleMap g = ghys_map();
    CHECK(pi_invariant(g, orbit_partition(g)) == 6);
    PLCircleMap u = cycle_map();
    CHECK(pi_invariant(u, orbit_partition(u)) == 1);
    CHECK(pi_invariant(PLCircleMap::rotation(1, Rational(2) / 5),
                       orbit_partition(PLCircleMap::rotation(1, Rational(2) / 5))) == 1);
    PLCircleMap bad = fixed_break_map();
    CHECK_THROWS_AS(pi_invariant(bad, orbit_partition(bad)), Error);
}

TEST_CASE("pl_from_jumps") {
    CHECK(pl_from_jumps(1, {}, 0).is_identity());
    CHECK(pl_from_jumps(1, {}, Rational(1) / 3) == PLCircleMap::rotation(1, Rational(2) / 3));

    PLCircleMap h = pl_from_jumps(1, {{Rational(0), Rational(6)}, {Rational(1) / 6, Rational(1) / 6}},
                                  Rational(1) / 6);
    CHECK(h.slope_right(0) == Rational(36) / 11);
    CHECK(h.slope_right(Rational(1) / 6) == Rational(6) / 11);
    CHECK(h.jump_at(0) == 6);
    CHECK(h.jump_at(Rational(1) / 6) == Rational(1) / 6);
    CHECK(h.image(Rational(1) / 6) == 0);

    CHECK_THROWS_AS(pl_from_jumps(1, {{Rational(0), Rational(2)}}, 0), Error); // product != 1
    CHECK_THROWS_AS(pl_from_jumps(1, {{Rational(0), Rational(2)}, {Rational(0), Rational(1) / 2}}, 0), Error);
    // jump-1 entries are no-ops
    CHECK(pl_from_jumps(1, {{Rational(1) / 2, Rational(1)}}, 0).is_identity());
}

TEST_CASE("build_H on the section-3.2 map") {
    PLCircleMap g = ghys_map();
    GroupContext ctx(1, {2, 3});
    auto [H, c] = build_H(g, orbit_partition(g), ctx);
    REQUIRE(c);
    CHECK(*c == Rational(1) / 6);
    CHECK(H.image(*c) == 0);
    CHECK(H.jump_at(0) == 6);           // = sigma_{g^2}(g(2/5)) = sigma_{g^2}(0)
    CHECK(H.jump_at(*c) == Rational(1) / 6); // carries Pi^{-1}
    CHECK(H.slope_right(0) == Rational(36) / 11);
}

TEST_CASE("to_boshernitzan: log-ratio case") {
    PLCircleMap g = ghys_map();
    GroupContext ctx(1, {2, 3});
    auto form = to_boshernitzan(g, 256, ctx);
    CHECK(form.pi == 6);
    CHECK(form.F.breaks().size() == 2);
    CHECK(form.F.jump_at(0) == 6);
    CHECK(compose(form.F, form.H) == compose(form.H, g)); // F o H = H o g
    REQUIRE(std::holds_alternative<LogRatio>(form.rho));
    auto expect = canonical_log_ratio(2, 6);
    CHECK(std::get<LogRatio>(form.rho) == std::get<LogRatio>(expect));
    // the conjugate keeps the rotation number
    CHECK(rho_bounds(form.F, 2000).contains(LOG2_OVER_LOG6));
}

TEST_CASE("to_boshernitzan: rational case") {
    GroupContext ctx(1, {2});
    auto rot = to_boshernitzan(PLCircleMap::rotation(1, Rational(2) / 5), 256, ctx);
    CHECK(rot.pi == 1);
    CHECK_FALSE(rot.c);
    REQUIRE(std::holds_alternative<RationalRho>(rot.rho));
    CHECK(std::get<RationalRho>(rot.rho) == RationalRho{2, 5});

    // cycle_map has Pi = 1 and rho = 1/3; its conjugate is the rotation by 1/3
    auto u = to_boshernitzan(cycle_map(), 256, ctx);
    CHECK(u.pi == 1);
    CHECK(u.F == PLCircleMap::rotation(1, Rational(1) / 3));
    REQUIRE(std::holds_alternative<RationalRho>(u.rho));
    CHECK(std::get<RationalRho>(u.rho) == RationalRho{1, 3});

    CHECK_THROWS_AS(to_boshernitzan(fixed_break_map(), 256, ctx), Error); // DNotSatisfied
}

TEST_CASE("numeric_h_sigma") {
    Interval h = numeric_h_sigma(Rational(1) / 6, Rational(1) / 2, 64);
    Rational tol = Rational(1) / boost::multiprecision::pow(Integer(10), 19);
    CHECK(h.lo_rational() < H_SIGMA_ORACLE + tol);
    CHECK(h.hi_rational() > H_SIGMA_ORACLE - tol);
    CHECK(h.width_le_pow2(64));
    // exact endpoints of the conjugator: h_sigma(0) = 0, h_sigma(1) = 1
    CHECK(numeric_h_sigma(6, 0).contains(0));
    CHECK(numeric_h_sigma(6, 1).contains(1));
    // monotone on a few sample points
    Interval a = numeric_h_sigma(6, Rational(1) / 4);
    Interval b = numeric_h_sigma(6, Rational(1) / 2);
    CHECK(a.hi_rational() < b.lo_rational());
    CHECK_THROWS_AS(numeric_h_sigma(1, Rational(1) / 2), Error);
    CHECK_THROWS_AS(numeric_h_sigma(-2, Rational(1) / 2), Error);
}

TEST_CASE("verify_linearization") {
    // the section-3.2 map is already in Boshernitzan form (f(2/5) = 0)
    CHECK(verify_linearization(ghys_map(), 16, 128));
    // sigma < 1 variant: slopes (1/2, 3), break 4/5, f(4/5) = 0, same rho
    PLCircleMap low = PLCircleMap::from_pieces(
        1, {{Rational(0), Rational(1) / 2}, {Rational(4) / 5, Rational(3)}}, Rational(3) / 5);
    CHECK(verify_linearization(low, 16, 128));
    // same slopes and break but wrong f0: not the linearized map
    PLCircleMap off = PLCircleMap::from_pieces(
        1, {{Rational(0), Rational(2)}, {Rational(2) / 5, Rational(1) / 3}}, Rational(1) / 5 + Rational(1) / 100);
    CHECK_FALSE(verify_linearization(off, 16, 128));
    CHECK_THROWS_AS(verify_linearization(PLCircleMap::identity(1), 8, 64), Error);
    CHECK_THROWS_AS(verify_linearization(cycle_map(), 8, 64), Error); // three breaks
}

TEST_CASE("to_boshernitzan output passes the linearization check") {
    GroupContext ctx(1, {2, 3});
    auto form = to_boshernitzan(ghys_map(), 256, ctx);
    CHECK(verify_linearization(form.F, 12, 96));
}
