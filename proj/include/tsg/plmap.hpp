#ifndef TSG_PLMAP_HPP
#define TSG_PLMAP_HPP

#include "tsg/arith.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace tsg {

struct Piece {
    Rational left;
    Rational slope;
    bool operator==(const Piece&) const = default;
};

struct Jump {
    Rational at;
    Rational value; // right slope / left slope, cyclic at 0
    bool operator==(const Jump&) const = default;
};

/// Orientation-preserving PL homeomorphism of the circle S_r, stored as the lift
/// with f0 = f~(0) in [0, r) and f~(x + r) = f~(x) + r.  0 is always a piece
/// boundary; adjacent pieces never share a slope (canonical form).
class PLCircleMap {
public:
    static PLCircleMap from_pieces(const Rational& r, std::vector<Piece> pieces, const Rational& f0) {
        if (r <= 0) fail("BadCircumference", "circumference must be positive");
        if (pieces.empty()) fail("Unsorted", "need at least one piece");
        if (pieces.front().left != 0) fail("Unsorted", "first piece must start at 0");
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (pieces[i].slope <= 0) fail("NonPositiveSlope", "slopes must be positive");
            if (pieces[i].left < 0 || pieces[i].left >= r) fail("Unsorted", "piece boundary outside [0, r)");
            if (i > 0 && pieces[i].left <= pieces[i - 1].left) fail("Unsorted", "piece boundaries must increase");
        }
        // merge adjacent equal slopes (left_0 = 0 stays even if its jump is 1)
        std::vector<Piece> canon;
        canon.reserve(pieces.size());
        for (auto& p : pieces) {
            if (!canon.empty() && canon.back().slope == p.slope) continue;
            canon.push_back(std::move(p));
        }
        Rational total = 0;
        for (std::size_t i = 0; i < canon.size(); ++i) {
            Rational right = (i + 1 < canon.size()) ? canon[i + 1].left : r;
            total += canon[i].slope * (right - canon[i].left);
        }
        if (total != r) fail("LengthMismatch", "sum of slope*length = " + format_rational(total) +
                                                  " != r = " + format_rational(r));
        return PLCircleMap(r, std::move(canon), rmod(f0, r));
    }

    static PLCircleMap identity(const Rational& r) { return from_pieces(r, {{Rational(0), Rational(1)}}, 0); }

    /// Rigid rotation by a on S_r.
    static PLCircleMap rotation(const Rational& r, const Rational& a) {
        return from_pieces(r, {{Rational(0), Rational(1)}}, rmod(a, r));
    }

    const Rational& r() const { return r_; }
    const Rational& f0() const { return f0_; }
    const std::vector<Piece>& pieces() const { return pieces_; }

    bool operator==(const PLCircleMap& o) const {
        return r_ == o.r_ && f0_ == o.f0_ && pieces_ == o.pieces_;
    }

    bool is_identity() const { return pieces_.size() == 1 && pieces_[0].slope == 1 && f0_ == 0; }

    /// Lift value f~(x) for any rational x.
    Rational evaluate(const Rational& x) const {
        Rational k = Rational(rfloor(x / r_));
        Rational x0 = x - k * r_;
        std::size_t i = locate(x0);
        return vals_[i] + pieces_[i].slope * (x0 - pieces_[i].left) + k * r_;
    }

    /// Some x with f~(x) = y (the lift inverse; unique).
    Rational invert_lift(const Rational& y) const {
        Rational k = Rational(rfloor((y - f0_) / r_));
        Rational y0 = y - k * r_; // in [f0, f0 + r)
        std::size_t lo = 0, hi = pieces_.size();
        while (hi - lo > 1) { // last i with vals_[i] <= y0
            std::size_t mid = (lo + hi) / 2;
            if (vals_[mid] <= y0) lo = mid;
            else hi = mid;
        }
        return pieces_[lo].left + (y0 - vals_[lo]) / pieces_[lo].slope + k * r_;
    }

    /// Circle image of a circle point, in [0, r).
    Rational image(const Rational& x) const { return rmod(evaluate(rmod(x, r_)), r_); }

    /// Circle preimage of a circle point, in [0, r).
    Rational preimage(const Rational& y) const { return rmod(invert_lift(rmod(y, r_)), r_); }

    Rational slope_right(const Rational& x) const {
        Rational x0 = rmod(x, r_);
        return pieces_[locate(x0)].slope;
    }

    Rational slope_left(const Rational& x) const {
        Rational x0 = rmod(x, r_);
        if (x0 == 0) return pieces_.back().slope;
        std::size_t i = locate(x0);
        if (pieces_[i].left == x0) return (i == 0) ? pieces_.back().slope : pieces_[i - 1].slope;
        return pieces_[i].slope;
    }

    /// sigma_f(x) = right slope / left slope; 1 off the break set.
    Rational jump_at(const Rational& x) const { return slope_right(x) / slope_left(x); }

    /// Jumps != 1, cyclically including 0.
    std::vector<Jump> jumps() const {
        std::vector<Jump> out;
        Rational j0 = pieces_.front().slope / pieces_.back().slope;
        if (j0 != 1) out.push_back({Rational(0), j0});
        for (std::size_t i = 1; i < pieces_.size(); ++i)
            out.push_back({pieces_[i].left, pieces_[i].slope / pieces_[i - 1].slope});
        return out;
    }

    /// True break points (where the jump is != 1), sorted.
    std::vector<Rational> breaks() const {
        std::vector<Rational> out;
        for (const auto& j : jumps()) out.push_back(j.at);
        return out;
    }

    friend PLCircleMap compose(const PLCircleMap& f, const PLCircleMap& g);
    friend PLCircleMap invert(const PLCircleMap& f);

private:
    PLCircleMap(Rational r, std::vector<Piece> pieces, Rational f0)
        : r_(std::move(r)), f0_(std::move(f0)), pieces_(std::move(pieces)) {
        vals_.reserve(pieces_.size());
        Rational v = f0_;
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            vals_.push_back(v);
            Rational right = (i + 1 < pieces_.size()) ? pieces_[i + 1].left : r_;
            v += pieces_[i].slope * (right - pieces_[i].left);
        }
    }

    /// Index of the piece containing x0 in [0, r).
    std::size_t locate(const Rational& x0) const {
        std::size_t lo = 0, hi = pieces_.size();
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            if (pieces_[mid].left <= x0) lo = mid;
            else hi = mid;
        }
        return lo;
    }

    static PLCircleMap from_candidates(const Rational& r, std::vector<Rational> candidates,
                                       const std::function<Rational(const Rational&)>& slopeAt,
                                       const Rational& f0) {
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        std::vector<Piece> pieces;
        pieces.reserve(candidates.size());
        for (const auto& c : candidates) pieces.push_back({c, slopeAt(c)});
        return from_pieces(r, std::move(pieces), f0);
    }

    Rational r_;
    Rational f0_;
    std::vector<Piece> pieces_;
    std::vector<Rational> vals_; // lift value at each piece's left endpoint
};

/// Exact composition f o g.
inline PLCircleMap compose(const PLCircleMap& f, const PLCircleMap& g) {
    if (f.r() != g.r()) fail("CircumferenceMismatch", "compose needs equal circumferences");
    const Rational& r = f.r();
    std::vector<Rational> cand;
    cand.push_back(0);
    for (const auto& p : g.pieces()) cand.push_back(p.left);
    for (const auto& p : f.pieces()) cand.push_back(g.preimage(p.left));
    auto slopeAt = [&](const Rational& c) { return f.slope_right(g.image(c)) * g.slope_right(c); };
    Rational f0 = rmod(f.evaluate(g.f0()), r);
    return PLCircleMap::from_candidates(r, std::move(cand), slopeAt, f0);
}

inline PLCircleMap invert(const PLCircleMap& f) {
    const Rational& r = f.r();
    std::vector<Rational> cand;
    cand.push_back(0);
    for (const auto& p : f.pieces()) cand.push_back(f.image(p.left));
    auto slopeAt = [&](const Rational& c) { return 1 / f.slope_right(f.preimage(c)); };
    Rational f0 = f.preimage(0);
    return PLCircleMap::from_candidates(r, std::move(cand), slopeAt, f0);
}

inline PLCircleMap power(const PLCircleMap& f, const Integer& n) {
    if (n < 0) return power(invert(f), -n);
    PLCircleMap acc = PLCircleMap::identity(f.r());
    PLCircleMap base = f;
    Integer k = n;
    while (k > 0) {
        if ((k & 1) != 0) acc = compose(acc, base);
        k >>= 1;
        if (k > 0) base = compose(base, base);
    }
    return acc;
}

inline bool equals(const PLCircleMap& f, const PLCircleMap& g) { return f == g; }

/// Conjugation by the homothety H_Q: S_r -> S_{Qr}.
inline PLCircleMap rescale(const PLCircleMap& f, const Rational& Q) {
    if (Q <= 0) fail("BadHomothety", "scale must be positive");
    std::vector<Piece> pieces;
    pieces.reserve(f.pieces().size());
    for (const auto& p : f.pieces()) pieces.push_back({p.left * Q, p.slope});
    return PLCircleMap::from_pieces(f.r() * Q, std::move(pieces), f.f0() * Q);
}

/// Membership in T_{r,(n_i)}: slopes in Lambda, subdivision points and their
/// images (0 included whether or not it is a true break) in A = Z[1/m].
inline bool membership(const PLCircleMap& f, const GroupContext& ctx) {
    if (f.r() != ctx.r) fail("CircumferenceMismatch", "map lives on a different circle than the context");
    if (!in_ring(f.f0(), ctx.m)) return false;
    for (const auto& p : f.pieces()) {
        if (!slope_decompose(p.slope, ctx)) return false;
        if (!in_ring(p.left, ctx.m)) return false;
        if (!in_ring(f.image(p.left), ctx.m)) return false;
    }
    return true;
}

} // namespace tsg

#endif // TSG_PLMAP_HPP
