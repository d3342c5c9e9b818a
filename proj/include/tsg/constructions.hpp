#ifndef TSG_CONSTRUCTIONS_HPP
#define TSG_CONSTRUCTIONS_HPP

#include "tsg/conjugacy.hpp"

#include <optional>
#include <vector>

namespace tsg {

// ---------------------------------------------------------------------------
// Boshernitzan maps
// ---------------------------------------------------------------------------

/// The two-slope map with breaks 0 and a = r(1-lambda2)/(lambda1-lambda2),
/// f(a) = 0, f(0) = lambda2*(r-a); rotation number log(l1)/(log(l1)-log(l2)).
inline PLCircleMap boshernitzan(const Rational& r, const Rational& lambda1, const Rational& lambda2) {
    if (lambda1 <= 0 || lambda2 <= 0) fail("SlopesOnSameSideOfOne", "slopes must be positive");
    if (!((lambda1 > 1) != (lambda2 > 1)) || lambda1 == 1 || lambda2 == 1)
        fail("SlopesOnSameSideOfOne", "need exactly one slope on each side of 1");
    Rational a = r * (1 - lambda2) / (lambda1 - lambda2);
    return PLCircleMap::from_pieces(r, {{Rational(0), lambda1}, {a, lambda2}}, lambda2 * (r - a));
}

// ---------------------------------------------------------------------------
// Bieri-Strebel interval equivalences
// ---------------------------------------------------------------------------

/// PL homeomorphism [0, sourceLength] -> [0, targetLength] fixing 0, with
/// slopes in Lambda and interior breaks in Z[1/m].
struct BSWitness {
    Rational sourceLength;
    Rational targetLength;
    std::vector<Piece> pieces; // sorted, first left == 0

    Rational slope_right(const Rational& x) const { return pieces[locate(x)].slope; }

    Rational apply(const Rational& x) const {
        if (x < 0 || x > sourceLength) fail("DomainError", "point outside [0, sourceLength]");
        std::size_t i = locate(x);
        return value_at(i) + pieces[i].slope * (x - pieces[i].left);
    }

    Rational apply_inverse(const Rational& y) const {
        if (y < 0 || y > targetLength) fail("DomainError", "point outside [0, targetLength]");
        std::size_t i = pieces.size() - 1;
        while (i > 0 && value_at(i) > y) --i;
        return pieces[i].left + (y - value_at(i)) / pieces[i].slope;
    }

    std::size_t locate(const Rational& x) const {
        std::size_t i = pieces.size() - 1;
        while (i > 0 && pieces[i].left > x) --i;
        return i;
    }

    Rational value_at(std::size_t i) const { // image of pieces[i].left
        Rational v = 0;
        for (std::size_t j = 0; j < i; ++j) v += pieces[j].slope * (pieces[j + 1].left - pieces[j].left);
        return v;
    }
};

inline bool bs_equivalent(const Rational& l, const Rational& lp, const GroupContext& ctx) {
    if (l <= 0 || lp <= 0) fail("BadLength", "lengths must be positive");
    return in_dA(l - lp, ctx);
}

namespace detail {

inline BSWitness bs_identity(const Rational& l) { return {l, l, {{Rational(0), Rational(1)}}}; }

/// Slope n on [0, s], slope 1 after: stretches the length by (n-1)s.
inline BSWitness bs_stretch(const Rational& length, const Integer& n, const Rational& s) {
    BSWitness w{length, length + Rational(n - 1) * s, {{Rational(0), Rational(n)}}};
    if (s < length) w.pieces.push_back({s, Rational(1)});
    return w;
}

/// Slope 1/n on [0, n*c], slope 1 after: shrinks the length by (n-1)c.
inline BSWitness bs_shrink(const Rational& length, const Integer& n, const Rational& c) {
    BSWitness w{length, length - Rational(n - 1) * c, {{Rational(0), Rational(1) / Rational(n)}}};
    if (Rational(n) * c < length) w.pieces.push_back({Rational(n) * c, Rational(1)});
    return w;
}

/// outer after inner; adjacent equal slopes are merged.
inline BSWitness bs_compose(const BSWitness& outer, const BSWitness& inner) {
    if (inner.targetLength != outer.sourceLength) fail("CircumferenceMismatch", "witness lengths do not chain");
    std::vector<Rational> cands;
    for (const auto& p : inner.pieces) cands.push_back(p.left);
    for (const auto& p : outer.pieces) cands.push_back(inner.apply_inverse(p.left));
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    BSWitness w{inner.sourceLength, outer.targetLength, {}};
    for (const auto& c : cands) {
        Rational slope = outer.slope_right(inner.apply(c)) * inner.slope_right(c);
        if (!w.pieces.empty() && w.pieces.back().slope == slope) continue;
        w.pieces.push_back({c, slope});
    }
    return w;
}

/// Largest element of Z[1/m] that is <= bound and >= bound/2 (bound > 0).
inline Rational ring_floor_chunk(const Rational& bound, const Integer& m) {
    if (in_ring(bound, m)) return bound;
    Rational step = 1;
    while (step > bound / 2) step /= Rational(m);
    return Rational(rfloor(bound / step)) * step;
}

} // namespace detail

/// Constructive Bieri-Strebel equivalence: a witness exists iff l = lp mod dA.
inline std::optional<BSWitness> bs_witness(const Rational& l, const Rational& lp, const GroupContext& ctx) {
    if (!bs_equivalent(l, lp, ctx)) return std::nullopt;
    BSWitness w = detail::bs_identity(l);
    if (l == lp) return w;

    // lp - l = sum_i (c_i * a) (n_i - 1) with a = (lp - l)/d and sum c_i (n_i - 1) = d
    Rational a = (lp - l) / Rational(ctx.d);
    std::vector<Integer> nm1;
    for (const auto& n : ctx.basis) nm1.push_back(n - 1);
    auto [g, coeffs] = bezout(nm1);
    std::vector<std::pair<Integer, Rational>> stretches, shrinks; // (n_i, amount)
    for (std::size_t i = 0; i < ctx.basis.size(); ++i) {
        Rational s = Rational(coeffs[i]) * a;
        if (s > 0) stretches.push_back({ctx.basis[i], s});
        else if (s < 0) shrinks.push_back({ctx.basis[i], -s});
    }

    Rational cur = l;
    for (auto& [n, s] : stretches) {
        while (s > 0) {
            Rational chunk = std::min(s, cur);
            if (chunk < s) chunk = detail::ring_floor_chunk(chunk, ctx.m);
            w = detail::bs_compose(detail::bs_stretch(cur, n, chunk), w);
            cur += Rational(n - 1) * chunk;
            s -= chunk;
        }
    }
    Rational floorLen = std::min(l, lp) / 2; // running length never drops below this
    for (auto& [n, s] : shrinks) {
        while (s > 0) {
            Rational chunk = std::min({s, Rational(cur / Rational(n)), Rational((cur - floorLen) / Rational(n - 1))});
            if (chunk < s) chunk = detail::ring_floor_chunk(chunk, ctx.m);
            w = detail::bs_compose(detail::bs_shrink(cur, n, chunk), w);
            cur -= Rational(n - 1) * chunk;
            s -= chunk;
        }
    }
    return w;
}

/// Checks every BSWitness invariant; throws on violation.
inline void validate_bs_witness(const BSWitness& w, const GroupContext& ctx) {
    if (w.pieces.empty() || w.pieces.front().left != 0) fail("BadWitness", "pieces must start at 0");
    Rational total = 0;
    for (std::size_t i = 0; i < w.pieces.size(); ++i) {
        const auto& p = w.pieces[i];
        if (p.slope <= 0) fail("BadWitness", "non-positive slope");
        if (i > 0 && p.left <= w.pieces[i - 1].left) fail("BadWitness", "unsorted breaks");
        if (!slope_decompose(p.slope, ctx)) fail("BadWitness", "slope outside Lambda");
        if (i > 0 && !in_ring(p.left, ctx.m)) fail("BadWitness", "break outside Z[1/m]");
        if (i > 0 && !in_ring(w.value_at(i), ctx.m)) fail("BadWitness", "break image outside Z[1/m]");
        Rational right = (i + 1 < w.pieces.size()) ? w.pieces[i + 1].left : w.sourceLength;
        total += p.slope * (right - p.left);
    }
    if (w.pieces.back().left >= w.sourceLength) fail("BadWitness", "break at or past the right endpoint");
    if (total != w.targetLength) fail("BadWitness", "endpoint does not map to endpoint");
}

// ---------------------------------------------------------------------------
// Transport between circumferences
// ---------------------------------------------------------------------------

/// Conjugates f by the witness (both circles cut at 0): w o f o w^{-1} on S_{lp}.
inline PLCircleMap transport(const PLCircleMap& f, const BSWitness& w) {
    if (f.r() != w.sourceLength) fail("CircumferenceMismatch", "f lives on a different circle than the witness");
    std::vector<Rational> xs = {Rational(0)};
    for (const auto& b : f.breaks()) xs.push_back(b);
    for (const auto& p : w.pieces) {
        xs.push_back(p.left);
        xs.push_back(f.preimage(rmod(p.left, f.r())));
    }
    std::vector<Rational> cands;
    for (const auto& x : xs) cands.push_back(x < w.sourceLength ? w.apply(x) : Rational(0));
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    std::vector<Piece> pieces;
    for (const auto& c : cands) {
        Rational x = w.apply_inverse(c);
        Rational slope = w.slope_right(f.image(x)) * f.slope_right(x) / w.slope_right(x);
        pieces.push_back({c, slope});
    }
    return PLCircleMap::from_pieces(w.targetLength, pieces, w.apply(f.image(0)));
}

// ---------------------------------------------------------------------------
// Theorem 1B: finite-order elements
// ---------------------------------------------------------------------------

inline bool finite_order_exists(const GroupContext& ctx, const Integer& q) {
    if (ctx.basis.size() != 1) fail("SingleGeneratorRequired", "Theorem 1B needs basis (m)");
    if (denominator(ctx.r) != 1 || ctx.r <= 0) fail("NonIntegerCircumference", "r must be a positive integer");
    if (q < 1) fail("BadOrder", "q must be >= 1");
    Integer g = igcd(ctx.basis[0] - 1, q);
    return numerator(ctx.r) % g == 0;
}

/// Rotation by u*p on S_{uq} transported to S_r; order q, rotation number p/q.
inline std::optional<PLCircleMap> finite_order_element(const GroupContext& ctx, const Integer& q,
                                                       const Integer& p) {
    if (igcd(p, q) != 1) fail("BadRotationData", "p/q must be reduced");
    if (!finite_order_exists(ctx, q)) return std::nullopt;
    Integer m1 = ctx.basis[0] - 1;
    Integer r = numerator(ctx.r);
    Integer u = 1;
    while ((u * q - r) % m1 != 0) ++u; // terminates: gcd(m-1, q) | r
    PLCircleMap rot = PLCircleMap::rotation(Rational(u * q), Rational(u * p));
    auto w = bs_witness(Rational(u * q), ctx.r, ctx);
    if (!w) fail("InternalError", "u*q = r mod (m-1) must be witnessable");
    PLCircleMap f = transport(rot, *w);
    auto n = order_of(f, q.convert_to<unsigned long>());
    auto rho = exact_rational_rho(f);
    if (!n || *n != q.convert_to<unsigned long>() || !rho || *rho != make_rational_rho(Rational(p) / Rational(q)))
        fail("InternalError", "constructed element failed its order/rho verification");
    return f;
}

// ---------------------------------------------------------------------------
// Theorem 2A: commuting Stein families
// ---------------------------------------------------------------------------

/// The section-3.3 family on S_{r_k}, r_k = k(Pi-1)/d: Boshernitzan maps with
/// slopes (n_i, n_i/Pi). A basis member equal to Pi gives the identity (degenerate).
inline std::vector<PLCircleMap> stein_family(const GroupContext& ctx, const Integer& k) {
    if (k < 1) fail("BadFamilyIndex", "k must be >= 1");
    PiResult pi = find_pi(ctx);
    Rational rk = Rational(k) * Rational(pi.Pi - 1) / Rational(ctx.d);
    std::vector<PLCircleMap> out;
    for (const auto& n : ctx.basis) {
        Rational lambda2 = Rational(n) / Rational(pi.Pi);
        if (lambda2 == 1) out.push_back(PLCircleMap::identity(rk));
        else out.push_back(boshernitzan(rk, Rational(n), lambda2));
    }
    GroupContext cr = ctx.with_r(rk);
    for (const auto& f : out)
        if (!membership(f, cr)) fail("InternalError", "stein_family member failed membership");
    return out;
}

// ---------------------------------------------------------------------------
// Q-independence and the rank certificate
// ---------------------------------------------------------------------------

/// True iff {beta} U {alpha_i} are multiplicatively independent, which is
/// Q-independence of {1} U {log alpha_i / log beta}.
inline bool qindependence_check(const std::vector<LogRatio>& rhos) {
    if (rhos.empty()) return true;
    for (const auto& r : rhos)
        if (!(r.beta == rhos.front().beta)) fail("MixedDenominators", "all log-ratios need a common beta");
    std::vector<ExponentVector> vecs = {rhos.front().beta};
    for (const auto& r : rhos) vecs.push_back(r.alpha);
    return detail::q_rank(vecs) == vecs.size();
}

struct FreeAbelianCertificate {
    std::vector<PLCircleMap> members; // f_2, ..., f_p
    Integer Pi;
    std::vector<LogRatio> rhos;
    std::size_t rank = 0;
};

/// Theorem 2A witness: the commuting sub-family f_2..f_p with Q-independent
/// rotation numbers log(n_i)/log(Pi).
inline FreeAbelianCertificate free_abelian_witness(const GroupContext& ctx, const Integer& k) {
    if (ctx.basis.size() < 2) fail("RankUnavailable", "need at least two basis members");
    std::vector<PLCircleMap> family = stein_family(ctx, k);
    PiResult pi = find_pi(ctx);
    FreeAbelianCertificate cert;
    cert.Pi = pi.Pi;
    for (std::size_t i = 1; i < family.size(); ++i) {
        cert.members.push_back(family[i]);
        auto rho = canonical_log_ratio(Rational(ctx.basis[i]), Rational(pi.Pi));
        if (!std::holds_alternative<LogRatio>(rho))
            fail("RankUnavailable", "rotation number of a family member is rational");
        cert.rhos.push_back(std::get<LogRatio>(rho));
    }
    for (std::size_t i = 0; i < cert.members.size(); ++i)
        for (std::size_t j = i + 1; j < cert.members.size(); ++j)
            if (!(compose(cert.members[i], cert.members[j]) == compose(cert.members[j], cert.members[i])))
                fail("InternalError", "family members do not commute");
    std::optional<Rational> commonPi;
    for (const auto& f : cert.members) {
        Rational v = pi_invariant(f, orbit_partition(f));
        if (!commonPi) commonPi = v;
        else if (*commonPi != v) fail("InternalError", "pi-invariants differ across the family");
    }
    if (!qindependence_check(cert.rhos)) fail("RankUnavailable", "rotation numbers are Q-dependent");
    cert.rank = cert.rhos.size();
    return cert;
}

// ---------------------------------------------------------------------------
// Theorem 2C': realizing a prescribed log-ratio
// ---------------------------------------------------------------------------

/// Boshernitzan on S_{d*n_beta} with slopes (alpha, alpha/beta) and rotation
/// number log(alpha)/log(beta); needs beta - 1 = d * n_beta * lambda, lambda in Lambda.
inline PLCircleMap realize_log_ratio(const GroupContext& ctx, const Rational& alpha, const Rational& beta,
                                     long expBound = 16) {
    if (!(1 < alpha && alpha < beta)) fail("FactorizationFailure", "need 1 < alpha < beta");
    if (!slope_decompose(alpha, ctx) || !slope_decompose(beta, ctx))
        fail("FactorizationFailure", "alpha, beta must lie in Lambda");

    // enumerate lambda over the exponent box and keep integer n_beta = (beta-1)/(d*lambda)
    std::vector<Integer> nbetas;
    std::vector<long> exps(ctx.basis.size(), -expBound);
    for (;;) {
        Rational lambda = 1;
        for (std::size_t i = 0; i < exps.size(); ++i) {
            for (long e = 0; e < std::abs(exps[i]); ++e)
                lambda = exps[i] > 0 ? lambda * Rational(ctx.basis[i]) : lambda / Rational(ctx.basis[i]);
        }
        Rational nb = (beta - 1) / (Rational(ctx.d) * lambda);
        if (nb >= 1 && denominator(nb) == 1) nbetas.push_back(numerator(nb));
        std::size_t i = 0;
        while (i < exps.size() && exps[i] == expBound) exps[i++] = -expBound;
        if (i == exps.size()) break;
        ++exps[i];
    }
    std::sort(nbetas.begin(), nbetas.end());
    nbetas.erase(std::unique(nbetas.begin(), nbetas.end()), nbetas.end());
    // prefer the lambda = 1 decomposition (the paper's choice), then smallest n_beta
    Rational direct = (beta - 1) / Rational(ctx.d);
    if (denominator(direct) == 1) {
        auto it = std::find(nbetas.begin(), nbetas.end(), numerator(direct));
        if (it != nbetas.end()) std::rotate(nbetas.begin(), it, it + 1);
    }

    for (const auto& nb : nbetas) {
        Rational r = Rational(ctx.d * nb);
        PLCircleMap f = boshernitzan(r, alpha, alpha / beta);
        if (membership(f, ctx.with_r(r))) return f;
    }
    fail("FactorizationFailure", "no (n_beta, lambda) decomposition in the exponent box yields a group element");
}

// ---------------------------------------------------------------------------
// Lemma 3 bumps
// ---------------------------------------------------------------------------

/// The four-piece bump (slopes k, 1, 1/k, 1) supported on [a0, b0], moving x0 by alpha.
inline PLCircleMap bump_alpha(const GroupContext& ctx, const Integer& k, const Rational& a0, const Rational& b0,
                              const Rational& x0, const Rational& alpha) {
    bool inBasis = std::find(ctx.basis.begin(), ctx.basis.end(), k) != ctx.basis.end();
    if (k < 2 || !inBasis) fail("ParameterOutOfRange", "k must be a basis member >= 2");
    if (!(0 <= a0 && a0 < x0 && x0 < b0 && b0 <= ctx.r)) fail("ParameterOutOfRange", "need 0 <= a0 < x0 < b0 <= r");
    if (!in_ring(a0, ctx.m) || !in_ring(b0, ctx.m) || !in_ring(alpha, ctx.m))
        fail("ParameterOutOfRange", "a0, b0, alpha must lie in Z[1/m]");
    Rational cap = Rational(k - 1) * std::min(Rational(x0 - a0), Rational((b0 - x0) / Rational(k)));
    if (!(0 < alpha && alpha <= cap)) fail("ParameterOutOfRange", "alpha outside (0, (k-1)*min(x0-a0,(b0-x0)/k)]");

    Rational a0p = a0 + alpha / Rational(k - 1);      // end of the slope-k ramp
    Rational b0p = b0 - Rational(k) * alpha / Rational(k - 1); // start of the slope-1/k ramp
    std::vector<Piece> pieces;
    if (a0 > 0) pieces.push_back({Rational(0), Rational(1)});
    pieces.push_back({a0, Rational(k)});
    if (a0p < b0p) pieces.push_back({a0p, Rational(1)});
    pieces.push_back({b0p, Rational(1) / Rational(k)});
    if (b0 < ctx.r) pieces.push_back({b0, Rational(1)});
    PLCircleMap f = PLCircleMap::from_pieces(ctx.r, pieces, 0);
    if (f.image(x0) != x0 + alpha) fail("InternalError", "bump failed its displacement check");
    if (!membership(f, ctx)) fail("ParameterOutOfRange", "alpha/(k-1) must lie in Z[1/m] for the ramp breaks");
    return f;
}

} // namespace tsg

#endif // TSG_CONSTRUCTIONS_HPP
