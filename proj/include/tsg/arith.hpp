#ifndef TSG_ARITH_HPP
#define TSG_ARITH_HPP

#include <boost/multiprecision/gmp.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tsg {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

/// Error with a stable machine-readable code, used by the CLI for exit codes.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& msg) {
    throw Error(code, msg);
}

inline Integer numerator(const Rational& x) { return boost::multiprecision::numerator(x); }
inline Integer denominator(const Rational& x) { return boost::multiprecision::denominator(x); }

/// Largest integer <= x.
inline Integer rfloor(const Rational& x) {
    Integer q, r;
    boost::multiprecision::divide_qr(numerator(x), denominator(x), q, r);
    if (r != 0 && x < 0) --q;
    return q;
}

/// x reduced into [0, period).
inline Rational rmod(const Rational& x, const Rational& period) {
    Rational q = x / period;
    Rational y = x - Rational(rfloor(q)) * period;
    if (y < 0) y += period;       // guard against q being an exact integer boundary
    if (y >= period) y -= period;
    return y;
}

inline std::string format_rational(const Rational& x) {
    std::string s = numerator(x).str();
    if (denominator(x) != 1) s += "/" + denominator(x).str();
    return s;
}

inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(Integer(s));
        Integer num(s.substr(0, slash));
        Integer den(s.substr(slash + 1));
        if (den <= 0) fail("BadRational", "denominator must be positive in '" + s + "'");
        return Rational(num) / Rational(den);
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        fail("BadRational", "cannot parse '" + s + "'");
    }
}

// ---------------------------------------------------------------------------
// Prime-exponent vectors
// ---------------------------------------------------------------------------

/// A positive rational as a finite map prime -> exponent; the empty map is 1.
struct ExponentVector {
    std::map<Integer, Integer> exps;

    bool operator==(const ExponentVector&) const = default;

    bool is_one() const { return exps.empty(); }

    ExponentVector& mul(const ExponentVector& o) {
        for (const auto& [p, e] : o.exps) {
            auto it = exps.find(p);
            if (it == exps.end()) {
                exps.emplace(p, e);
            } else {
                it->second += e;
                if (it->second == 0) exps.erase(it);
            }
        }
        return *this;
    }

    ExponentVector& invert() {
        for (auto& [p, e] : exps) e = -e;
        return *this;
    }

    ExponentVector pow(const Integer& k) const {
        ExponentVector out;
        if (k == 0) return out;
        for (const auto& [p, e] : exps) out.exps.emplace(p, e * k);
        return out;
    }

    Rational value() const {
        Rational v = 1;
        for (const auto& [p, e] : exps) {
            Integer a = boost::multiprecision::pow(p, static_cast<unsigned>(boost::multiprecision::abs(e)));
            if (e > 0) v *= Rational(a);
            else v /= Rational(a);
        }
        return v;
    }
};

/// Trial-division factorization; inputs are desk-scale.
inline ExponentVector factorize(Integer n) {
    if (n < 1) fail("BadFactorArgument", "factorize needs n >= 1");
    ExponentVector ev;
    Integer p = 2;
    while (p * p <= n) {
        if (n % p == 0) {
            Integer e = 0;
            while (n % p == 0) { n /= p; ++e; }
            ev.exps.emplace(p, e);
        }
        p += (p == 2) ? 1 : 2;
    }
    if (n > 1) ev.exps.emplace(n, 1);
    return ev;
}

/// Exponent vector of a positive rational.
inline ExponentVector factorize_rational(const Rational& q) {
    if (q <= 0) fail("BadFactorArgument", "factorize_rational needs q > 0");
    ExponentVector ev = factorize(numerator(q));
    ev.mul(factorize(denominator(q)).invert());
    return ev;
}

namespace detail {

/// Rank over Q of a list of exponent vectors (Gaussian elimination on exact rationals).
inline std::size_t q_rank(const std::vector<ExponentVector>& vecs) {
    std::vector<Integer> primes;
    for (const auto& v : vecs)
        for (const auto& [p, e] : v.exps)
            if (std::find(primes.begin(), primes.end(), p) == primes.end()) primes.push_back(p);
    std::sort(primes.begin(), primes.end());

    std::vector<std::vector<Rational>> m(vecs.size(), std::vector<Rational>(primes.size(), 0));
    for (std::size_t i = 0; i < vecs.size(); ++i)
        for (const auto& [p, e] : vecs[i].exps) {
            auto col = std::lower_bound(primes.begin(), primes.end(), p) - primes.begin();
            m[i][static_cast<std::size_t>(col)] = Rational(e);
        }

    std::size_t rank = 0;
    for (std::size_t col = 0; col < primes.size() && rank < m.size(); ++col) {
        std::size_t piv = rank;
        while (piv < m.size() && m[piv][col] == 0) ++piv;
        if (piv == m.size()) continue;
        std::swap(m[piv], m[rank]);
        for (std::size_t i = rank + 1; i < m.size(); ++i) {
            if (m[i][col] == 0) continue;
            Rational factor = m[i][col] / m[rank][col];
            for (std::size_t j = col; j < primes.size(); ++j) m[i][j] -= factor * m[rank][j];
        }
        ++rank;
    }
    return rank;
}

} // namespace detail

/// True iff the prime-exponent vectors of the basis are Q-linearly independent.
inline bool check_independent(const std::vector<Integer>& basis) {
    if (basis.empty()) fail("BadBasis", "empty basis");
    std::vector<ExponentVector> vecs;
    vecs.reserve(basis.size());
    for (const auto& n : basis) {
        if (n < 2) fail("BadBasis", "basis members must be >= 2");
        vecs.push_back(factorize(n));
    }
    return detail::q_rank(vecs) == basis.size();
}

// ---------------------------------------------------------------------------
// Group context
// ---------------------------------------------------------------------------

inline Integer ilcm(const Integer& a, const Integer& b) { return boost::multiprecision::lcm(a, b); }
inline Integer igcd(const Integer& a, const Integer& b) { return boost::multiprecision::gcd(a, b); }

/// A Thompson-Stein group: circumference r and slope basis n_1 < ... < n_p.
/// Derived data: m = lcm(n_i) (break ring Z[1/m]) and d = gcd(n_i - 1).
struct GroupContext {
    Rational r;
    std::vector<Integer> basis;
    Integer m;
    Integer d;
    std::vector<ExponentVector> basisExps;

    GroupContext(Rational r_, std::vector<Integer> basis_) : r(std::move(r_)), basis(std::move(basis_)) {
        if (r <= 0) fail("BadContext", "circumference must be positive");
        if (basis.empty()) fail("BadContext", "empty basis");
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (basis[i] < 2) fail("BadContext", "basis members must be >= 2");
            if (i > 0 && basis[i] <= basis[i - 1]) fail("BadContext", "basis must be strictly increasing");
        }
        if (!check_independent(basis)) fail("BasisNotIndependent", "basis is multiplicatively dependent");
        m = 1;
        d = 0;
        for (const auto& n : basis) {
            m = ilcm(m, n);
            d = igcd(d, n - 1);
            basisExps.push_back(factorize(n));
        }
    }

    GroupContext with_r(const Rational& newR) const {
        GroupContext c(*this);
        c.r = newR;
        if (newR <= 0) fail("BadContext", "circumference must be positive");
        return c;
    }

    std::size_t rank() const { return basis.size(); }
};

/// True iff every prime factor of den(x) divides m, i.e. x in Z[1/m].
inline bool in_ring(const Rational& x, const Integer& m) {
    if (m < 2) fail("BadRing", "m must be >= 2");
    Integer den = denominator(x);
    while (den != 1) {
        Integer g = igcd(den, m);
        if (g == 1) return false;
        while (den % g == 0) den /= g;
    }
    return true;
}

inline bool in_ring(const Rational& x, const GroupContext& ctx) { return in_ring(x, ctx.m); }

/// Membership in (1 - Lambda)A = dA: x/d in Z[1/m].  d = 0 cannot happen for a valid context.
inline bool in_dA(const Rational& x, const GroupContext& ctx) {
    if (x == 0) return true;
    return in_ring(x / Rational(ctx.d), ctx.m);
}

/// Exponents s_i with prod n_i^{s_i} = q, unique by independence; nullopt if q is not in <n_i>.
inline std::optional<std::vector<Integer>> slope_decompose(const Rational& q, const GroupContext& ctx) {
    if (q <= 0) fail("BadSlope", "slope_decompose needs q > 0");
    ExponentVector target = factorize_rational(q);

    std::vector<Integer> primes;
    for (const auto& v : ctx.basisExps)
        for (const auto& [p, e] : v.exps)
            if (std::find(primes.begin(), primes.end(), p) == primes.end()) primes.push_back(p);
    // a prime in q that no basis member carries rules membership out immediately
    for (const auto& [p, e] : target.exps)
        if (std::find(primes.begin(), primes.end(), p) == primes.end()) return std::nullopt;
    std::sort(primes.begin(), primes.end());

    const std::size_t rows = primes.size();
    const std::size_t cols = ctx.basis.size();
    std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(cols + 1, 0));
    for (std::size_t j = 0; j < cols; ++j)
        for (const auto& [p, e] : ctx.basisExps[j].exps) {
            auto row = std::lower_bound(primes.begin(), primes.end(), p) - primes.begin();
            a[static_cast<std::size_t>(row)][j] = Rational(e);
        }
    for (const auto& [p, e] : target.exps) {
        auto row = std::lower_bound(primes.begin(), primes.end(), p) - primes.begin();
        a[static_cast<std::size_t>(row)][cols] = Rational(e);
    }

    // Gaussian elimination; the basis columns have full column rank.
    std::vector<std::size_t> pivotRow(cols, SIZE_MAX);
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t piv = rank;
        while (piv < rows && a[piv][col] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[rank]);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == rank || a[i][col] == 0) continue;
            Rational factor = a[i][col] / a[rank][col];
            for (std::size_t j = col; j <= cols; ++j) a[i][j] -= factor * a[rank][j];
        }
        pivotRow[col] = rank;
        ++rank;
    }
    // rows without a pivot must have zero rhs, otherwise q is outside the span
    for (std::size_t i = rank; i < rows; ++i)
        if (a[i][cols] != 0) return std::nullopt;

    std::vector<Integer> sol(cols);
    for (std::size_t col = 0; col < cols; ++col) {
        if (pivotRow[col] == SIZE_MAX) return std::nullopt; // dependent basis; callers validate earlier
        Rational v = a[pivotRow[col]][cols] / a[pivotRow[col]][col];
        if (denominator(v) != 1) return std::nullopt;
        sol[col] = numerator(v);
    }
    // exact verification
    Rational check = 1;
    for (std::size_t j = 0; j < cols; ++j) {
        ExponentVector ev = factorize(ctx.basis[j]).pow(sol[j]);
        check *= ev.value();
    }
    if (check != q) return std::nullopt;
    return sol;
}

/// Extended gcd folded left to right: g = gcd(values), sum coeffs_i * values_i = g.
inline std::pair<Integer, std::vector<Integer>> bezout(const std::vector<Integer>& values) {
    if (values.empty()) fail("BadBezout", "empty input");
    bool allZero = std::all_of(values.begin(), values.end(), [](const Integer& v) { return v == 0; });
    if (allZero) fail("BadBezout", "all-zero input");

    auto ext = [](const Integer& a, const Integer& b) {
        Integer old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
        while (r != 0) {
            Integer q = old_r / r;
            Integer tmp;
            tmp = old_r - q * r; old_r = r; r = tmp;
            tmp = old_s - q * s; old_s = s; s = tmp;
            tmp = old_t - q * t; old_t = t; t = tmp;
        }
        if (old_r < 0) { old_r = -old_r; old_s = -old_s; old_t = -old_t; }
        return std::tuple<Integer, Integer, Integer>(old_r, old_s, old_t);
    };

    Integer g = values[0];
    std::vector<Integer> coeffs(values.size(), 0);
    coeffs[0] = (g < 0) ? -1 : 1;
    g = boost::multiprecision::abs(g);
    for (std::size_t i = 1; i < values.size(); ++i) {
        auto [g2, u, v] = ext(g, values[i]);
        for (std::size_t j = 0; j < i; ++j) coeffs[j] *= u;
        coeffs[i] = v;
        g = g2;
    }
    return {g, coeffs};
}

/// Result of the Pi search: Pi = prod n_i^{alpha_i}, alpha_i >= 1, gcd((Pi-1)/d, d) = 1.
struct PiResult {
    std::vector<Integer> alphas;
    Integer Pi;
};

inline Integer pi_from_alphas(const GroupContext& ctx, const std::vector<Integer>& alphas) {
    Integer Pi = 1;
    for (std::size_t i = 0; i < alphas.size(); ++i)
        Pi *= boost::multiprecision::pow(ctx.basis[i], static_cast<unsigned>(alphas[i]));
    return Pi;
}

/// Finds Pi in Lambda with all exponents positive and gcd((Pi-1)/d, d) = 1.
/// Tries the all-ones tuple first, then the Bezout correction on the k_i = (n_i-1)/d.
inline PiResult find_pi(const GroupContext& ctx) {
    const Integer d = ctx.d;
    auto admissible = [&](const std::vector<Integer>& alphas) -> std::optional<Integer> {
        Integer Pi = pi_from_alphas(ctx, alphas);
        Integer w = (Pi - 1) / d;
        if ((Pi - 1) % d != 0) return std::nullopt;
        if (igcd(w, d) != 1) return std::nullopt;
        return Pi;
    };

    std::vector<Integer> ones(ctx.basis.size(), 1);
    if (auto Pi = admissible(ones)) return {ones, *Pi};

    // k_i = (n_i - 1)/d are coprime; pick beta with sum k_i beta_i = 1
    std::vector<Integer> ks;
    for (const auto& n : ctx.basis) ks.push_back((n - 1) / d);
    auto [g, beta] = bezout(ks);
    // g == 1 by definition of d

    std::vector<Integer> alphaP(ctx.basis.size());
    Integer w = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        alphaP[i] = boost::multiprecision::abs(beta[i]) + 1;
        w += ks[i] * alphaP[i];
    }
    Integer dprime = igcd(w, d);
    std::vector<Integer> alphas(ctx.basis.size());
    if (dprime == 1) {
        alphas = alphaP;
    } else {
        Integer n = d / dprime;
        for (std::size_t i = 0; i < ks.size(); ++i) alphas[i] = n * alphaP[i] + beta[i];
    }
    auto Pi = admissible(alphas);
    if (!Pi) fail("PiSearchFailed", "Bezout correction did not produce an admissible Pi");
    return {alphas, *Pi};
}

} // namespace tsg

#endif // TSG_ARITH_HPP
