#ifndef TSG_CONJUGACY_HPP
#define TSG_CONJUGACY_HPP

#include "tsg/rotnum.hpp"

#include <optional>
#include <vector>

namespace tsg {

// ---------------------------------------------------------------------------
// Orbit partition of the break set
// ---------------------------------------------------------------------------

enum class PartitionStatus { Complete, TruncatedAtBound };

struct OrbitClass {
    Rational anchor;
    std::vector<Rational> iterates; // break members in chain order, anchor first
    unsigned long l = 0;            // iterate count: last member = f^l(anchor)
    Rational jumpProduct = 1;
    bool closed = false; // the chain returned to its anchor (periodic orbit piece)
};

struct OrbitPartition {
    std::vector<OrbitClass> classes;
    PartitionStatus status = PartitionStatus::Complete;
};

struct DVerdict {
    enum class Kind { Yes, No, Unknown };
    Kind kind;
    OrbitPartition partition;
    std::optional<std::size_t> witnessClass; // set for No
    unsigned long bound = 0;                 // set for Unknown
};

/// sigma_{f^k}(x) via the cocycle chain rule.
inline Rational jump_chain(const PLCircleMap& f, unsigned long k, const Rational& x) {
    if (k < 1) fail("BadChainLength", "k must be >= 1");
    Rational prod = 1;
    Rational y = rmod(x, f.r());
    for (unsigned long j = 0; j < k; ++j) {
        prod *= f.jump_at(y);
        y = f.image(y);
    }
    return prod;
}

/// Groups BP(f) by "some f-iterate within maxIter steps maps one break to another".
inline OrbitPartition orbit_partition(const PLCircleMap& f, unsigned long maxIter = 256) {
    if (maxIter < 1) fail("BadIterationBound", "maxIter must be >= 1");
    std::vector<Rational> breaks = f.breaks();
    const std::size_t n = breaks.size();
    auto find_break = [&](const Rational& x) -> std::optional<std::size_t> {
        auto it = std::lower_bound(breaks.begin(), breaks.end(), x);
        if (it != breaks.end() && *it == x) return static_cast<std::size_t>(it - breaks.begin());
        return std::nullopt;
    };

    // next break hit on the forward orbit of each break
    std::vector<std::optional<std::pair<std::size_t, unsigned long>>> nxt(n);
    std::vector<bool> hasIncoming(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        Rational x = breaks[i];
        for (unsigned long t = 1; t <= maxIter; ++t) {
            x = f.image(x);
            if (auto j = find_break(x)) {
                nxt[i] = {*j, t};
                hasIncoming[*j] = true;
                break;
            }
        }
    }

    OrbitPartition out;
    std::vector<bool> visited(n, false);
    auto emit_chain = [&](std::size_t start, bool closed) {
        OrbitClass cls;
        cls.anchor = breaks[start];
        cls.closed = closed;
        std::size_t i = start;
        for (;;) {
            visited[i] = true;
            cls.iterates.push_back(breaks[i]);
            cls.jumpProduct *= f.jump_at(breaks[i]);
            if (!nxt[i] || nxt[i]->first == start || visited[nxt[i]->first]) break;
            cls.l += nxt[i]->second;
            i = nxt[i]->first;
        }
        out.classes.push_back(std::move(cls));
    };

    for (std::size_t i = 0; i < n; ++i)
        if (!hasIncoming[i] && !visited[i]) emit_chain(i, false);
    // leftovers are cycles: anchor at the smallest point of each
    for (std::size_t i = 0; i < n; ++i)
        if (!visited[i]) emit_chain(i, true); // breaks sorted, so i is the smallest unvisited
    return out;
}

/// Semi-decision of the (D)-property: classes that provably closed up decide No;
/// all products 1 decides Yes (later merges keep products trivial); otherwise Unknown.
inline DVerdict has_D_property(const PLCircleMap& f, unsigned long maxIter = 256) {
    OrbitPartition part = orbit_partition(f, maxIter);
    bool allOne = true;
    std::optional<std::size_t> witness;
    for (std::size_t i = 0; i < part.classes.size(); ++i) {
        if (part.classes[i].jumpProduct != 1) {
            allOne = false;
            if (part.classes[i].closed && !witness) witness = i;
        }
    }
    if (allOne) return {DVerdict::Kind::Yes, std::move(part), std::nullopt, 0};
    if (witness) return {DVerdict::Kind::No, std::move(part), witness, 0};
    part.status = PartitionStatus::TruncatedAtBound;
    return {DVerdict::Kind::Unknown, std::move(part), std::nullopt, maxIter};
}

/// Pi(f) = prod over classes and 0 < k <= l_i of sigma_{f^{N+1}}(f^k(a_i)), N = max l_i.
inline Rational pi_invariant(const PLCircleMap& f, const OrbitPartition& partition) {
    unsigned long N = 0;
    for (const auto& cls : partition.classes) {
        if (cls.jumpProduct != 1) fail("DNotSatisfied", "pi_invariant needs all jump products trivial");
        N = std::max(N, cls.l);
    }
    Rational pi = 1;
    for (const auto& cls : partition.classes) {
        Rational x = cls.anchor;
        for (unsigned long k = 1; k <= cls.l; ++k) {
            x = f.image(x);
            pi *= jump_chain(f, N + 1, x);
        }
    }
    return pi;
}

// ---------------------------------------------------------------------------
// Maps from jump data (Lemma 2 machinery)
// ---------------------------------------------------------------------------

/// The unique PL circle map with the given break/jump data and value 0 at
/// normalizeAt; the global slope scale comes from the length identity.
inline PLCircleMap pl_from_jumps(const Rational& r, std::vector<std::pair<Rational, Rational>> breaks,
                                 const Rational& normalizeAt) {
    // drop no-op entries, validate
    std::erase_if(breaks, [](const auto& b) { return b.second == 1; });
    Rational prod = 1;
    for (const auto& [pt, jump] : breaks) {
        if (pt < 0 || pt >= r) fail("DuplicatePoints", "break point outside [0, r)");
        if (jump <= 0) fail("JumpProductNotOne", "jumps must be positive");
        prod *= jump;
    }
    if (prod != 1) fail("JumpProductNotOne", "jump product is " + format_rational(prod));
    std::sort(breaks.begin(), breaks.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < breaks.size(); ++i)
        if (breaks[i].first == breaks[i - 1].first) fail("DuplicatePoints", "repeated break point");

    std::vector<Piece> pieces;
    if (breaks.empty()) {
        pieces.push_back({Rational(0), Rational(1)});
    } else {
        // relative slopes around the circle, starting after the first break
        std::vector<Rational> rel(breaks.size());
        rel[0] = 1;
        for (std::size_t i = 1; i < breaks.size(); ++i) rel[i] = rel[i - 1] * breaks[i].second;
        Rational weighted = 0;
        for (std::size_t i = 0; i < breaks.size(); ++i) {
            Rational right = (i + 1 < breaks.size()) ? breaks[i + 1].first : breaks[0].first + r;
            weighted += rel[i] * (right - breaks[i].first);
        }
        Rational scale = r / weighted;
        if (breaks[0].first != 0) pieces.push_back({Rational(0), scale * rel.back()});
        for (std::size_t i = 0; i < breaks.size(); ++i) pieces.push_back({breaks[i].first, scale * rel[i]});
    }
    PLCircleMap zeroBased = PLCircleMap::from_pieces(r, pieces, 0);
    return PLCircleMap::from_pieces(r, zeroBased.pieces(), rmod(-zeroBased.evaluate(rmod(normalizeAt, r)), r));
}

/// Deterministic smallest-denominator element of Z[1/m] in [0, r) avoiding `excluded`
/// and fixed points of f.
inline Rational pick_extra_break(const PLCircleMap& f, const Integer& m, const std::vector<Rational>& excluded) {
    const Rational& r = f.r();
    for (unsigned level = 0;; ++level) {
        Integer den = boost::multiprecision::pow(m, level);
        for (Integer num = 0; Rational(num) / Rational(den) < r; ++num) {
            Rational c = Rational(num) / Rational(den);
            if (denominator(c) != den) continue; // seen at a lower level
            bool bad = f.image(c) == c;
            for (const auto& e : excluded) bad = bad || (e == c);
            if (!bad) return c;
        }
    }
}

namespace detail {
/// Exact k-th root of a positive rational; fails when the root is irrational.
inline Rational rational_root(const Rational& x, unsigned long k) {
    if (x <= 0) fail("NormalFormFailure", "root of a non-positive value");
    Integer num, den;
    bool ok = mpz_root(num.backend().data(), numerator(x).backend().data(), k) != 0;
    ok = ok && mpz_root(den.backend().data(), denominator(x).backend().data(), k) != 0;
    if (!ok) fail("NormalFormFailure", "periodic break class needs an irrational jump scale");
    return Rational(num) / Rational(den);
}
} // namespace detail

/// Lemma 2 conjugator: H carries jumps sigma_{f^{N+1}} at the non-anchor orbit
/// points; when Pi(f) != 1 an extra break c in Z[1/m] takes jump Pi^{-1} with H(c) = 0.
inline std::pair<PLCircleMap, std::optional<Rational>> build_H(const PLCircleMap& f,
                                                               const OrbitPartition& partition,
                                                               const GroupContext& ctx) {
    unsigned long N = 0;
    for (const auto& cls : partition.classes) {
        if (cls.jumpProduct != 1) fail("DNotSatisfied", "build_H needs the (D)-property");
        N = std::max(N, cls.l);
    }
    std::vector<std::pair<Rational, Rational>> entries;
    std::vector<Rational> orbitPoints;
    Rational pi = 1;
    for (const auto& cls : partition.classes) {
        if (!cls.closed) {
            Rational x = cls.anchor;
            orbitPoints.push_back(x);
            for (unsigned long k = 1; k <= cls.l; ++k) {
                x = f.image(x);
                orbitPoints.push_back(x);
                Rational sigma = jump_chain(f, N + 1, x);
                pi *= sigma;
                if (sigma != 1) entries.push_back({x, sigma});
            }
            continue;
        }
        // periodic class: solve sigma_H(f^k(a)) = t / sigma_{f^k}(a) directly; the
        // free scale t makes the class's jump product 1 and must be rational
        std::vector<Rational> chain(cls.l + 1);
        chain[0] = 1;
        Rational x = cls.anchor;
        Rational cInv = 1;
        for (unsigned long k = 0; k <= cls.l; ++k) {
            if (k > 0) chain[k] = chain[k - 1] * f.jump_at(x), x = f.image(x);
            cInv *= 1 / chain[k];
        }
        Rational t = detail::rational_root(1 / cInv, cls.l + 1);
        x = cls.anchor;
        for (unsigned long k = 0; k <= cls.l; ++k) {
            orbitPoints.push_back(x);
            Rational sigma = t / chain[k];
            if (sigma != 1) entries.push_back({x, sigma});
            x = f.image(x);
        }
    }
    std::optional<Rational> c;
    Rational normalizeAt = 0;
    if (pi != 1) {
        c = pick_extra_break(f, ctx.m, orbitPoints);
        entries.push_back({*c, 1 / pi});
        normalizeAt = *c;
    }
    return {pl_from_jumps(f.r(), std::move(entries), normalizeAt), c};
}

// ---------------------------------------------------------------------------
// Boshernitzan normal form and symbolic rotation number
// ---------------------------------------------------------------------------

struct BoshernitzanForm {
    PLCircleMap F; // H o f o H^{-1}, at most two breaks
    PLCircleMap H;
    RotationNumber rho;
    std::optional<Rational> c;
    Rational pi = 1;
};

inline BoshernitzanForm to_boshernitzan(const PLCircleMap& f, unsigned long maxIter, const GroupContext& ctx) {
    DVerdict verdict = has_D_property(f, maxIter);
    if (verdict.kind != DVerdict::Kind::Yes)
        fail("DNotSatisfied", verdict.kind == DVerdict::Kind::No ? "(D)-property fails"
                                                                 : "(D)-property undecided at this bound");
    Rational pi = pi_invariant(f, verdict.partition);
    auto [H, c] = build_H(f, verdict.partition, ctx);
    PLCircleMap F = compose(H, compose(f, invert(H)));
    std::size_t breakCount = F.breaks().size();
    if (breakCount > 2)
        fail("NormalFormFailure", "conjugate has " + std::to_string(breakCount) +
                                      " breaks; re-run with a larger maxIter");
    RotationNumber rho{RationalRho{0, 1}};
    if (pi != 1) {
        Rational lambda1 = F.slope_right(0);
        auto canon = canonical_log_ratio(lambda1, pi);
        if (std::holds_alternative<LogRatio>(canon)) rho = std::get<LogRatio>(canon);
        else rho = std::get<RationalRho>(canon);
    } else {
        if (breakCount != 0) fail("NormalFormFailure", "Pi = 1 but the conjugate is not a rotation");
        rho = make_rational_rho(F.f0() / F.r());
    }
    return {std::move(F), std::move(H), std::move(rho), std::move(c), std::move(pi)};
}

// ---------------------------------------------------------------------------
// Certified numerics: h_sigma and the linearization check
// ---------------------------------------------------------------------------

/// Certified interval of width <= 2^-precisionBits around (sigma^x - 1)/(sigma - 1).
inline Interval numeric_h_sigma(const Rational& sigma, const Rational& x, unsigned precisionBits = 128) {
    if (sigma <= 0 || sigma == 1) fail("BadSigma", "sigma must be positive and != 1");
    for (mpfr_prec_t prec = precisionBits + 32;; prec *= 2) {
        Interval num = pow_interval(sigma, Interval(x, prec), prec);
        num.add_q(-1);
        Interval denom(sigma - 1, prec);
        Interval h = num / denom;
        if (h.width_le_pow2(precisionBits)) return h;
        if (prec > 1u << 20) fail("PrecisionExhausted", "h_sigma did not converge");
    }
}

/// Checks the conjugacy Phi o R_rho = f o Phi (Phi = H_r o h_sigma) at sample points.
inline bool verify_linearization(const PLCircleMap& f, unsigned samples, unsigned precisionBits = 128) {
    std::vector<Rational> breaks = f.breaks();
    if (breaks.size() != 2 || breaks[0] != 0)
        fail("NotBoshernitzanForm", "need exactly two breaks, one of them at 0");
    if (samples < 1) fail("BadSampleCount", "samples must be >= 1");
    const Rational& r = f.r();
    Rational lambda1 = f.slope_right(0);
    Rational lambda2 = f.slope_right(breaks[1]);
    Rational sigma = lambda1 / lambda2;
    if (sigma == 1) fail("NotBoshernitzanForm", "equal slopes");

    mpfr_prec_t prec = std::max<mpfr_prec_t>(precisionBits, 64) + 32;
    Interval rho = log_interval(lambda1, prec) / log_interval(sigma, prec);
    detail::LiftEvaluator lift(f, prec);
    Rational invDenom = 1 / (sigma - 1);

    auto phi = [&](const Interval& x) {
        Interval num = pow_interval(sigma, x, prec);
        num.add_q(-1);
        Interval h = (invDenom > 0) ? num.mul_posq(invDenom) : (-num).mul_posq(-invDenom);
        return h.mul_posq(r);
    };

    for (unsigned j = 0; j < samples; ++j) {
        Rational x = Rational(Integer(j)) / Rational(Integer(samples));
        Interval shifted = rho;
        shifted.add_q(x);
        // frac(x + rho): try both unit translates when the interval straddles 1
        bool ok = false;
        for (int branch = 0; branch < 2 && !ok; ++branch) {
            Interval y = shifted;
            y.add_q(Rational(-branch));
            if (y.cmp_q(0) < 0 || y.cmp_q(1) > 0) continue; // certainly outside [0,1)
            Interval lhs = phi(y);
            Interval rhs = lift.forward(phi(Interval(x, prec)));
            Interval lhsShift = lhs;
            lhsShift.add_q(r);
            ok = lhs.overlaps(rhs) || lhsShift.overlaps(rhs);
        }
        if (!ok) return false;
    }
    return true;
}

} // namespace tsg

#endif // TSG_CONJUGACY_HPP
