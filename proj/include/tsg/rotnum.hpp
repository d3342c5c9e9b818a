#ifndef TSG_ROTNUM_HPP
#define TSG_ROTNUM_HPP

#include "tsg/interval.hpp"
#include "tsg/plmap.hpp"

#include <cmath>
#include <optional>
#include <variant>
#include <vector>

namespace tsg {

// ---------------------------------------------------------------------------
// Rotation-number value types
// ---------------------------------------------------------------------------

struct RationalRho {
    Integer p;
    Integer q; // reduced, 0 <= p/q < 1
    bool operator==(const RationalRho&) const = default;
    Rational value() const { return Rational(p) / Rational(q); }
};

inline RationalRho make_rational_rho(const Rational& v) {
    Rational x = rmod(v, 1);
    return {numerator(x), denominator(x)};
}

/// log(alpha)/log(beta) in canonical form 1 < alpha < beta (value in (0,1)).
struct LogRatio {
    ExponentVector alpha;
    ExponentVector beta;
    bool operator==(const LogRatio&) const = default;
    Interval value_interval(mpfr_prec_t prec = 128) const {
        return log_interval(alpha.value(), prec) / log_interval(beta.value(), prec);
    }
};

struct CertifiedInterval {
    Rational lo;
    Rational hi; // lo in [0,1); hi may exceed 1 for intervals wrapping past 0
    bool contains(const Rational& x) const {
        Rational y = rmod(x, 1);
        return (lo <= y && y <= hi) || (lo <= y + 1 && y + 1 <= hi);
    }
    Rational width() const { return hi - lo; }
};

using RotationNumber = std::variant<RationalRho, LogRatio, CertifiedInterval>;

/// Canonicalize log(alpha)/log(beta): force beta > 1, reduce the value mod 1 by
/// dividing alpha by powers of beta, and return a RationalRho when it collapses.
inline std::variant<RationalRho, LogRatio> canonical_log_ratio(Rational alpha, Rational beta) {
    if (alpha <= 0 || beta <= 0) fail("DegenerateLogRatio", "alpha, beta must be positive");
    if (beta == 1) fail("DegenerateLogRatio", "beta = 1 has no log-ratio");
    if (beta < 1) {
        alpha = 1 / alpha;
        beta = 1 / beta;
    }
    while (alpha >= beta) alpha /= beta;
    while (alpha < 1) alpha *= beta;
    if (alpha == 1) return RationalRho{0, 1};
    return LogRatio{factorize_rational(alpha), factorize_rational(beta)};
}

/// Sufficient equality test: (alpha', beta') = (alpha^t, beta^t) for one rational t.
inline bool same_log_ratio(const LogRatio& a, const LogRatio& b) {
    if (a == b) return true;
    if (a.beta.exps.empty() || b.beta.exps.empty()) return false;
    auto [p0, e0] = *a.beta.exps.begin();
    auto it = b.beta.exps.find(p0);
    if (it == b.beta.exps.end()) return false;
    Rational t = Rational(it->second) / Rational(e0);
    auto matches = [&](const ExponentVector& x, const ExponentVector& y) {
        // y == x^t componentwise
        if (x.exps.size() != y.exps.size()) return false;
        for (const auto& [p, e] : x.exps) {
            auto jt = y.exps.find(p);
            if (jt == y.exps.end()) return false;
            if (Rational(jt->second) != t * Rational(e)) return false;
        }
        return true;
    };
    return matches(a.beta, b.beta) && matches(a.alpha, b.alpha);
}

enum class Ordering { Less, Equal, Greater };

// ---------------------------------------------------------------------------
// Literal displacement extrema (spec definition, via power(f, q))
// ---------------------------------------------------------------------------

namespace detail {
/// power(f, q) plus the deck offset k with f~^q = (canonical lift of f^q) + k*r.
inline std::pair<PLCircleMap, Rational> power_with_deck(const PLCircleMap& f, const Integer& q) {
    PLCircleMap fq = power(f, q);
    Rational y = 0;
    for (Integer i = 0; i < q; ++i) y = f.evaluate(y);
    return {fq, y - fq.evaluate(0)}; // an exact integer multiple of r
}
} // namespace detail

/// Exact extrema of g(x) = f~^q(x) - x - p*r over one period, evaluated at the
/// breakpoints of power(f,q) plus 0.
inline std::pair<Rational, Rational> displacement_extrema(const PLCircleMap& f, const Integer& p,
                                                          const Integer& q) {
    if (q < 1) fail("BadPeriod", "q must be >= 1");
    auto [fq, deck] = detail::power_with_deck(f, q);
    Rational shift = Rational(p) * f.r() - deck;
    Rational mn = fq.evaluate(0) - shift;
    Rational mx = mn;
    for (const auto& piece : fq.pieces()) {
        Rational d = fq.evaluate(piece.left) - piece.left - shift;
        if (d < mn) mn = d;
        if (d > mx) mx = d;
    }
    return {mn, mx};
}

inline Ordering compare_rho(const PLCircleMap& f, const Integer& p, const Integer& q) {
    auto [mn, mx] = displacement_extrema(f, p, q);
    if (mn > 0) return Ordering::Greater;
    if (mx < 0) return Ordering::Less;
    return Ordering::Equal;
}

// ---------------------------------------------------------------------------
// Directed-rounding lift evaluation
// ---------------------------------------------------------------------------

namespace detail {

/// Evaluates the lift f~ (and its inverse) at mpfr points with a chosen
/// rounding direction; piece selection uses exact rational comparisons, and a
/// rounding slip across a period boundary is absorbed by shifting the deck index.
class LiftEvaluator {
public:
    LiftEvaluator(const PLCircleMap& f, mpfr_prec_t prec) : f_(f), prec_(prec) {
        Rational v = f.f0();
        for (std::size_t i = 0; i < f.pieces().size(); ++i) {
            vals_.push_back(v);
            Rational right = (i + 1 < f.pieces().size()) ? f.pieces()[i + 1].left : f.r();
            v += f.pieces()[i].slope * (right - f.pieces()[i].left);
        }
    }

    Interval forward(const Interval& x) const {
        Interval out(prec_);
        eval_fwd(out.lo_mut(), x.lo_raw(), MPFR_RNDD);
        eval_fwd(out.hi_mut(), x.hi_raw(), MPFR_RNDU);
        return out;
    }

    Interval backward(const Interval& y) const {
        Interval out(prec_);
        eval_bwd(out.lo_mut(), y.lo_raw(), MPFR_RNDD);
        eval_bwd(out.hi_mut(), y.hi_raw(), MPFR_RNDU);
        return out;
    }

private:
    Integer deck_index(mpfr_srcptr x, const Rational& offset) const {
        // the k with offset + k*r <= x < offset + (k+1)*r; double estimate, exact fixup
        double xd = mpfr_get_d(x, MPFR_RNDN);
        double rd = static_cast<double>(f_.r());
        double od = static_cast<double>(offset);
        Integer k(static_cast<long long>(std::floor((xd - od) / rd)));
        Rational lowEdge = offset + Rational(k) * f_.r();
        while (mpfr_cmp_q(x, mpq_view(lowEdge)) < 0) {
            --k;
            lowEdge -= f_.r();
        }
        Rational highEdge = lowEdge + f_.r();
        while (mpfr_cmp_q(x, mpq_view(highEdge)) >= 0) {
            ++k;
            highEdge += f_.r();
        }
        return k;
    }

    void eval_fwd(mpfr_ptr out, mpfr_srcptr x, mpfr_rnd_t rnd) const {
        Integer k = deck_index(x, 0);
        // x0 = x - k*r; rounding may push it just outside [0, r)
        Rational kr = Rational(k) * f_.r();
        mpfr_sub_q(out, x, mpq_view(kr), rnd);
        if (mpfr_sgn(out) < 0) {
            --k;
            mpfr_add_q(out, out, mpq_view(f_.r()), rnd);
        } else if (mpfr_cmp_q(out, mpq_view(f_.r())) >= 0) {
            ++k;
            mpfr_sub_q(out, out, mpq_view(f_.r()), rnd);
        }
        std::size_t i = f_.pieces().size() - 1;
        while (i > 0 && mpfr_cmp_q(out, mpq_view(f_.pieces()[i].left)) < 0) --i;
        finish(out, rnd, f_.pieces()[i].left, f_.pieces()[i].slope, vals_[i], k);
    }

    void eval_bwd(mpfr_ptr out, mpfr_srcptr y, mpfr_rnd_t rnd) const {
        Integer k = deck_index(y, f_.f0());
        Rational kr = Rational(k) * f_.r();
        mpfr_sub_q(out, y, mpq_view(kr), rnd); // y0 in [f0, f0 + r) up to rounding
        if (mpfr_cmp_q(out, mpq_view(vals_[0])) < 0) {
            --k;
            mpfr_add_q(out, out, mpq_view(f_.r()), rnd);
        } else if (mpfr_cmp_q(out, mpq_view(vals_[0] + f_.r())) >= 0) {
            ++k;
            mpfr_sub_q(out, out, mpq_view(f_.r()), rnd);
        }
        std::size_t i = f_.pieces().size() - 1;
        while (i > 0 && mpfr_cmp_q(out, mpq_view(vals_[i])) < 0) --i;
        Rational invSlope = 1 / f_.pieces()[i].slope;
        finish(out, rnd, vals_[i], invSlope, f_.pieces()[i].left, k);
    }

    /// out = base + slope*(out - pivot) + k*r, directed.
    void finish(mpfr_ptr out, mpfr_rnd_t rnd, const Rational& pivot, const Rational& slope,
                const Rational& base, const Integer& k) const {
        mpfr_sub_q(out, out, mpq_view(pivot), rnd);
        mpfr_mul_q(out, out, mpq_view(slope), rnd); // slope > 0 keeps the direction
        Rational add = base + Rational(k) * f_.r();
        mpfr_add_q(out, out, mpq_view(add), rnd);
    }

    const PLCircleMap& f_;
    mpfr_prec_t prec_;
    std::vector<Rational> vals_;
};

} // namespace detail

// ---------------------------------------------------------------------------
// Rotation solver: orbit-cached Poincare comparisons
// ---------------------------------------------------------------------------

/// Answers compare_rho queries using cached break orbits: the displacement of
/// f^q at the breakpoint f^{-j}(b) equals f~^{q-j}(b) - f~^{-j}(b), so extrema
/// over BP(f^q) reduce to orbit differences.  Exact rationals for small q,
/// certified MPFR intervals (with precision escalation) for deep q.
class RotationSolver {
public:
    explicit RotationSolver(const PLCircleMap& f, mpfr_prec_t prec = 192, long exactCap = 4096)
        : f_(f), prec_(prec), exactCap_(exactCap) {
        base_ = f.breaks();
        bool hasZero = false;
        for (const auto& b : base_) hasZero = hasZero || (b == 0);
        if (!hasZero) base_.insert(base_.begin(), Rational(0));
        fwdEx_.assign(base_.size(), {});
        bwdEx_.assign(base_.size(), {});
        for (std::size_t i = 0; i < base_.size(); ++i) {
            fwdEx_[i].push_back(base_[i]);
            bwdEx_[i].push_back(base_[i]);
        }
        reset_intervals();
    }

    /// nullopt = could not certify (deep near-tie); callers report honest absence.
    std::optional<Ordering> compare(const Integer& p, const Integer& q) {
        if (q < 1) fail("BadPeriod", "q must be >= 1");
        if (q <= exactCap_) return compare_exact(q, Rational(p) * f_.r());
        for (;;) {
            auto v = compare_interval(q, Rational(p) * f_.r());
            if (v) return v;
            if (prec_ >= 1536) break;
            prec_ *= 2;
            reset_intervals();
        }
        if (q <= 4 * exactCap_) return compare_exact(q, Rational(p) * f_.r());
        return std::nullopt;
    }

private:
    void reset_intervals() {
        eval_.emplace(f_, prec_);
        fwdIv_.assign(base_.size(), {});
        bwdIv_.assign(base_.size(), {});
        for (std::size_t i = 0; i < base_.size(); ++i) {
            fwdIv_[i].push_back(Interval(base_[i], prec_));
            bwdIv_[i].push_back(Interval(base_[i], prec_));
        }
    }

    void ensure_exact(std::size_t q) {
        for (std::size_t i = 0; i < base_.size(); ++i) {
            while (fwdEx_[i].size() <= q) fwdEx_[i].push_back(f_.evaluate(fwdEx_[i].back()));
            while (bwdEx_[i].size() <= q) bwdEx_[i].push_back(f_.invert_lift(bwdEx_[i].back()));
        }
    }

    void ensure_interval(std::size_t q) {
        for (std::size_t i = 0; i < base_.size(); ++i) {
            while (fwdIv_[i].size() <= q) fwdIv_[i].push_back(eval_->forward(fwdIv_[i].back()));
            while (bwdIv_[i].size() <= q) bwdIv_[i].push_back(eval_->backward(bwdIv_[i].back()));
        }
    }

    Ordering compare_exact(const Integer& qI, const Rational& shift) {
        std::size_t q = static_cast<std::size_t>(qI);
        ensure_exact(q);
        bool first = true;
        Rational mn, mx;
        for (std::size_t i = 0; i < base_.size(); ++i) {
            for (std::size_t j = 0; j < q; ++j) {
                Rational d = fwdEx_[i][q - j] - bwdEx_[i][j];
                if (first || d < mn) mn = d;
                if (first || d > mx) mx = d;
                first = false;
            }
        }
        if (mn > shift) return Ordering::Greater;
        if (mx < shift) return Ordering::Less;
        return Ordering::Equal;
    }

    std::optional<Ordering> compare_interval(const Integer& qI, const Rational& shift) {
        std::size_t q = static_cast<std::size_t>(qI);
        ensure_interval(q);
        bool sawAbove = false, sawBelow = false, sawUnknown = false;
        mpfr_t t;
        mpfr_init2(t, prec_);
        for (std::size_t i = 0; i < base_.size() && !(sawAbove && sawBelow); ++i) {
            for (std::size_t j = 0; j < q; ++j) {
                // lower bound of D_j
                mpfr_sub(t, fwdIv_[i][q - j].lo_raw(), bwdIv_[i][j].hi_raw(), MPFR_RNDD);
                if (mpfr_cmp_q(t, detail::mpq_view(shift)) > 0) {
                    sawAbove = true;
                    continue;
                }
                // upper bound of D_j
                mpfr_sub(t, fwdIv_[i][q - j].hi_raw(), bwdIv_[i][j].lo_raw(), MPFR_RNDU);
                if (mpfr_cmp_q(t, detail::mpq_view(shift)) < 0) {
                    sawBelow = true;
                    continue;
                }
                sawUnknown = true;
            }
        }
        mpfr_clear(t);
        if (sawAbove && sawBelow) return Ordering::Equal; // certified strict straddle
        if (sawUnknown) return std::nullopt;
        if (sawAbove) return Ordering::Greater;
        if (sawBelow) return Ordering::Less;
        return std::nullopt; // q = 0 cannot happen; defensive
    }

    PLCircleMap f_;
    mpfr_prec_t prec_;
    long exactCap_;
    std::vector<Rational> base_;
    std::vector<std::vector<Rational>> fwdEx_, bwdEx_;
    std::vector<std::vector<Interval>> fwdIv_, bwdIv_;
    std::optional<detail::LiftEvaluator> eval_;
};

// ---------------------------------------------------------------------------
// Stern-Brocot descent
// ---------------------------------------------------------------------------

/// Exact rational rotation number by Stern-Brocot mediant descent; absent when
/// maxDepth is exhausted or a deep comparison cannot be certified.
inline std::optional<RationalRho> exact_rational_rho(const PLCircleMap& f, unsigned maxDepth = 64) {
    if (maxDepth < 1) fail("BadDepth", "maxDepth must be >= 1");
    RotationSolver solver(f);
    auto c0 = solver.compare(0, 1);
    if (!c0) return std::nullopt;
    if (*c0 == Ordering::Equal) return RationalRho{0, 1};
    // no fixed point: rho lies strictly inside (0, 1)
    Integer lp = 0, lq = 1, rp = 1, rq = 1;
    for (unsigned depth = 0; depth < maxDepth; ++depth) {
        Integer mp = lp + rp, mq = lq + rq;
        auto c = solver.compare(mp, mq);
        if (!c) return std::nullopt;
        switch (*c) {
        case Ordering::Equal:
            return RationalRho{mp, mq};
        case Ordering::Greater:
            lp = mp;
            lq = mq;
            break;
        case Ordering::Less:
            rp = mp;
            rq = mq;
            break;
        }
    }
    return std::nullopt;
}

/// [f~^n(0)/(rn) - 1/n, + 1/n] translated so the lower end lies in [0,1).
inline CertifiedInterval rho_bounds(const PLCircleMap& f, unsigned long n) {
    if (n < 1) fail("BadIterationCount", "n must be >= 1");
    Rational y = 0;
    for (unsigned long i = 0; i < n; ++i) y = f.evaluate(y);
    Rational c = y / (f.r() * Rational(Integer(n)));
    Rational lo = c - Rational(1) / Rational(Integer(n));
    Rational hi = c + Rational(1) / Rational(Integer(n));
    Rational t = Rational(rfloor(lo));
    lo -= t;
    hi -= t;
    if (lo >= 1) {
        lo -= 1;
        hi -= 1;
    }
    return {lo, hi};
}

/// Smallest x in [0, r) with f~^q(x) = x + p*r, if any.
inline std::optional<Rational> periodic_point(const PLCircleMap& f, const Integer& p, const Integer& q) {
    if (q < 1) fail("BadPeriod", "q must be >= 1");
    auto [fq, deck] = detail::power_with_deck(f, q);
    Rational shift = Rational(p) * f.r() - deck;
    const auto& pieces = fq.pieces();
    std::optional<Rational> best;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        Rational left = pieces[i].left;
        Rational right = (i + 1 < pieces.size()) ? pieces[i + 1].left : fq.r();
        Rational dl = fq.evaluate(left) - left - shift;
        if (dl == 0) {
            if (!best || left < *best) best = left;
            continue;
        }
        Rational dslope = pieces[i].slope - 1;
        if (dslope == 0) continue;
        Rational root = left - dl / dslope;
        if (root > left && root < right) {
            if (!best || root < *best) best = root;
        }
    }
    return best;
}

/// Least q <= maxOrder with f^q = identity.
inline std::optional<unsigned long> order_of(const PLCircleMap& f, unsigned long maxOrder) {
    if (maxOrder < 1) fail("BadOrderBound", "maxOrder must be >= 1");
    PLCircleMap g = f;
    for (unsigned long q = 1; q <= maxOrder; ++q) {
        if (g.is_identity()) return q;
        g = compose(g, f);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// m-adic diagnostic (Theorem 1A proof machinery)
// ---------------------------------------------------------------------------

struct MadicProfile {
    struct Entry {
        unsigned long n;
        Integer M;
        unsigned long N; // f^n(0) = M / m^N, minimal N (m does not divide M unless M = 0)
    };
    std::vector<Entry> entries;
    std::vector<Integer> slopeLog; // cumulative sum of slope exponents e(f^k(0))
};

inline MadicProfile madic_profile(const PLCircleMap& f, const GroupContext& ctx, unsigned long n) {
    if (ctx.basis.size() != 1) fail("NotMAdic", "madic_profile needs a single-generator context");
    const Integer& m = ctx.m;
    for (const auto& piece : f.pieces()) {
        if (!slope_decompose(piece.slope, ctx)) fail("NotMAdic", "slope outside <m>");
        if (!in_ring(piece.left, m) || !in_ring(f.image(piece.left), m))
            fail("NotMAdic", "break data outside Z[1/m]");
    }
    if (!in_ring(f.f0(), m)) fail("NotMAdic", "f0 outside Z[1/m]");

    MadicProfile out;
    Rational x = 0;
    Integer cum = 0;
    for (unsigned long k = 0; k <= n; ++k) {
        Rational y = x;
        unsigned long N = 0;
        while (denominator(y) != 1) {
            y *= Rational(m);
            ++N;
        }
        out.entries.push_back({k, numerator(y), N});
        auto e = slope_decompose(f.slope_right(x), ctx);
        cum += (*e)[0];
        out.slopeLog.push_back(cum);
        x = f.image(x);
    }
    return out;
}

} // namespace tsg

#endif // TSG_ROTNUM_HPP
