#ifndef TSG_INTERVAL_HPP
#define TSG_INTERVAL_HPP

#include "tsg/arith.hpp"

#include <mpfr.h>

#include <utility>

namespace tsg {

namespace detail {
/// mpq_t view of a boost mpq_rational (no copy).
inline mpq_srcptr mpq_view(const Rational& x) { return x.backend().data(); }
} // namespace detail

/// Closed interval [lo, hi] with MPFR endpoints, all operations outward-rounded.
class Interval {
public:
    explicit Interval(mpfr_prec_t prec = 128) : prec_(prec) {
        mpfr_init2(lo_, prec_);
        mpfr_init2(hi_, prec_);
        mpfr_set_zero(lo_, 1);
        mpfr_set_zero(hi_, 1);
    }

    Interval(const Rational& x, mpfr_prec_t prec) : Interval(prec) { set(x); }

    Interval(const Interval& o) : Interval(o.prec_) {
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }

    Interval(Interval&& o) noexcept : prec_(o.prec_) {
        mpfr_init2(lo_, prec_);
        mpfr_init2(hi_, prec_);
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
    }

    Interval& operator=(Interval o) {
        std::swap(prec_, o.prec_);
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
        return *this;
    }

    ~Interval() {
        mpfr_clear(lo_);
        mpfr_clear(hi_);
    }

    mpfr_prec_t prec() const { return prec_; }

    void set(const Rational& x) {
        mpfr_set_q(lo_, detail::mpq_view(x), MPFR_RNDD);
        mpfr_set_q(hi_, detail::mpq_view(x), MPFR_RNDU);
    }

    // --- arithmetic (outward rounding) ---

    Interval operator+(const Interval& o) const {
        Interval r(prec_);
        mpfr_add(r.lo_, lo_, o.lo_, MPFR_RNDD);
        mpfr_add(r.hi_, hi_, o.hi_, MPFR_RNDU);
        return r;
    }

    Interval operator-(const Interval& o) const {
        Interval r(prec_);
        mpfr_sub(r.lo_, lo_, o.hi_, MPFR_RNDD);
        mpfr_sub(r.hi_, hi_, o.lo_, MPFR_RNDU);
        return r;
    }

    Interval operator-() const {
        Interval r(prec_);
        mpfr_neg(r.lo_, hi_, MPFR_RNDD);
        mpfr_neg(r.hi_, lo_, MPFR_RNDU);
        return r;
    }

    Interval& add_q(const Rational& q) {
        mpfr_add_q(lo_, lo_, detail::mpq_view(q), MPFR_RNDD);
        mpfr_add_q(hi_, hi_, detail::mpq_view(q), MPFR_RNDU);
        return *this;
    }

    /// Multiply by a positive rational (monotone; endpoints keep their roles).
    Interval& mul_posq(const Rational& q) {
        mpfr_mul_q(lo_, lo_, detail::mpq_view(q), MPFR_RNDD);
        mpfr_mul_q(hi_, hi_, detail::mpq_view(q), MPFR_RNDU);
        return *this;
    }

    Interval operator*(const Interval& o) const {
        Interval r(prec_);
        mpfr_t t;
        mpfr_init2(t, prec_);
        // lo: min of the four products rounded down
        mpfr_mul(r.lo_, lo_, o.lo_, MPFR_RNDD);
        mpfr_mul(t, lo_, o.hi_, MPFR_RNDD);
        mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
        mpfr_mul(t, hi_, o.lo_, MPFR_RNDD);
        mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
        mpfr_mul(t, hi_, o.hi_, MPFR_RNDD);
        mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
        // hi: max of the four products rounded up
        mpfr_mul(r.hi_, lo_, o.lo_, MPFR_RNDU);
        mpfr_mul(t, lo_, o.hi_, MPFR_RNDU);
        mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
        mpfr_mul(t, hi_, o.lo_, MPFR_RNDU);
        mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
        mpfr_mul(t, hi_, o.hi_, MPFR_RNDU);
        mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
        mpfr_clear(t);
        return r;
    }

    /// Division; the divisor must not contain zero.
    Interval operator/(const Interval& o) const {
        if (o.contains_zero()) fail("IntervalDivByZero", "divisor interval straddles zero");
        Interval inv(prec_);
        if (mpfr_sgn(o.lo_) > 0 || mpfr_sgn(o.hi_) < 0) {
            mpfr_ui_div(inv.lo_, 1, o.hi_, MPFR_RNDD);
            mpfr_ui_div(inv.hi_, 1, o.lo_, MPFR_RNDU);
        }
        return *this * inv;
    }

    // --- elementary functions (monotone, so endpoint evaluation is exact reasoning) ---

    Interval log() const {
        if (mpfr_sgn(lo_) <= 0) fail("IntervalLogDomain", "log needs a strictly positive interval");
        Interval r(prec_);
        mpfr_log(r.lo_, lo_, MPFR_RNDD);
        mpfr_log(r.hi_, hi_, MPFR_RNDU);
        return r;
    }

    Interval exp() const {
        Interval r(prec_);
        mpfr_exp(r.lo_, lo_, MPFR_RNDD);
        mpfr_exp(r.hi_, hi_, MPFR_RNDU);
        return r;
    }

    // --- queries ---

    bool contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }

    bool contains(const Rational& q) const {
        return mpfr_cmp_q(lo_, detail::mpq_view(q)) <= 0 && mpfr_cmp_q(hi_, detail::mpq_view(q)) >= 0;
    }

    /// +1 if the whole interval is > q, -1 if < q, 0 if undecided.
    int cmp_q(const Rational& q) const {
        if (mpfr_cmp_q(lo_, detail::mpq_view(q)) > 0) return 1;
        if (mpfr_cmp_q(hi_, detail::mpq_view(q)) < 0) return -1;
        return 0;
    }

    bool overlaps(const Interval& o) const {
        return mpfr_cmp(lo_, o.hi_) <= 0 && mpfr_cmp(o.lo_, hi_) <= 0;
    }

    bool width_le_pow2(long negExp) const {
        mpfr_t w, b;
        mpfr_init2(w, prec_);
        mpfr_init2(b, prec_);
        mpfr_sub(w, hi_, lo_, MPFR_RNDU);
        mpfr_set_ui_2exp(b, 1, -negExp, MPFR_RNDN);
        bool ok = mpfr_cmp(w, b) <= 0;
        mpfr_clear(w);
        mpfr_clear(b);
        return ok;
    }

    // raw endpoint access for code that drives mpfr directly (PL lift evaluation)
    mpfr_srcptr lo_raw() const { return lo_; }
    mpfr_srcptr hi_raw() const { return hi_; }
    mpfr_ptr lo_mut() { return lo_; }
    mpfr_ptr hi_mut() { return hi_; }

    Rational lo_rational() const { return to_rational(lo_); }
    Rational hi_rational() const { return to_rational(hi_); }

    double lo_double() const { return mpfr_get_d(lo_, MPFR_RNDD); }
    double hi_double() const { return mpfr_get_d(hi_, MPFR_RNDU); }

    /// Takes floor(point interval) when both ends agree; fails otherwise.
    Integer certain_floor() const {
        mpfr_t fl, fh;
        mpfr_init2(fl, prec_);
        mpfr_init2(fh, prec_);
        mpfr_floor(fl, lo_);
        mpfr_floor(fh, hi_);
        bool same = mpfr_cmp(fl, fh) == 0;
        Integer out;
        if (same) {
            mpz_t z;
            mpz_init(z);
            mpfr_get_z(z, fl, MPFR_RNDN);
            out = Integer(z);
            mpz_clear(z);
        }
        mpfr_clear(fl);
        mpfr_clear(fh);
        if (!same) fail("IntervalFloorAmbiguous", "interval straddles an integer");
        return out;
    }

private:
    static Rational to_rational(mpfr_srcptr x) {
        mpq_t q;
        mpq_init(q);
        mpfr_get_q(q, x);
        Rational out(q);
        mpq_clear(q);
        return out;
    }

    mpfr_prec_t prec_;
    mpfr_t lo_, hi_;
};

/// log of a positive rational as a certified interval.
inline Interval log_interval(const Rational& q, mpfr_prec_t prec) {
    if (q <= 0) fail("IntervalLogDomain", "log needs q > 0");
    return Interval(q, prec).log();
}

/// sigma^x for rational sigma > 0 and interval exponent x, via exp(x * log sigma).
inline Interval pow_interval(const Rational& sigma, const Interval& x, mpfr_prec_t prec) {
    return (x * log_interval(sigma, prec)).exp();
}

} // namespace tsg

#endif // TSG_INTERVAL_HPP
