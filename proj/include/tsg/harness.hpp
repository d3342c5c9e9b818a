#ifndef TSG_HARNESS_HPP
#define TSG_HARNESS_HPP

#include "tsg/io.hpp"

#include <chrono>
#include <functional>
#include <sstream>

namespace tsg {

namespace detail {

struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }
};

} // namespace detail

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct SuiteCase {
    json params;
    std::string verdict; // "pass" | "fail" | "skip"
    json detail;
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<SuiteCase> cases;
    long long runtimeMs = 0;

    std::size_t count(const std::string& verdict) const {
        std::size_t n = 0;
        for (const auto& c : cases) n += (c.verdict == verdict);
        return n;
    }
    bool all_passed() const { return count("fail") == 0; }

    json to_json() const {
        json cs = json::array();
        for (const auto& c : cases)
            cs.push_back({{"params", c.params}, {"verdict", c.verdict}, {"detail", c.detail}});
        return {{"suite", suite},
                {"seed", seed},
                {"cases", cs},
                {"summary", {{"pass", count("pass")}, {"fail", count("fail")}, {"skip", count("skip")}}},
                {"runtimeMs", runtimeMs}};
    }
};

namespace detail {

class StopWatch {
public:
    StopWatch() : start_(std::chrono::steady_clock::now()) {}
    long long ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace detail

// ---------------------------------------------------------------------------
// Random words
// ---------------------------------------------------------------------------

struct WordSpec {
    std::vector<PLCircleMap> generators;
    unsigned maxLength = 0;
    std::uint64_t seed = 0;
};

/// Deterministic-in-seed composition of <= maxLength generators and inverses.
inline PLCircleMap random_word(const WordSpec& spec) {
    if (spec.generators.empty()) fail("BadWordSpec", "need at least one generator");
    const Rational& r = spec.generators.front().r();
    for (const auto& g : spec.generators)
        if (g.r() != r) fail("BadWordSpec", "generators live on different circles");
    detail::SplitMix64 rng{spec.seed};
    PLCircleMap w = PLCircleMap::identity(r);
    std::uint64_t len = rng.below(spec.maxLength + 1);
    for (std::uint64_t i = 0; i < len; ++i) {
        const PLCircleMap& g = spec.generators[rng.below(spec.generators.size())];
        w = compose(w, rng.below(2) ? invert(g) : g);
    }
    return w;
}

namespace detail {

/// Standard sampling generators for T_{r,m}: the unit rotation and a Lemma 3 bump.
inline std::vector<PLCircleMap> standard_generators(const GroupContext& ctx) {
    Integer m = ctx.basis.front();
    Rational alpha = Rational(m - 1) / Rational(m * m * m);
    return {PLCircleMap::rotation(ctx.r, 1),
            bump_alpha(ctx, m, 0, 1, Rational(1) / Rational(m), alpha)};
}

} // namespace detail

// ---------------------------------------------------------------------------
// Theorem suites
// ---------------------------------------------------------------------------

/// Theorem 1B: finite-order elements exist iff gcd(m-1, q) | r; constructive
/// cases are verified exactly, the converse direction by word sampling (evidence).
inline SuiteReport run_thm1_suite(std::pair<int, int> mRange, std::pair<int, int> rRange,
                                  std::pair<int, int> qRange, std::uint64_t seed = 1,
                                  unsigned samplesPerCase = 6) {
    detail::StopWatch watch;
    SuiteReport rep{"thm1", seed, {}, 0};
    for (int m = mRange.first; m <= mRange.second; ++m) {
        for (int r = rRange.first; r <= rRange.second; ++r) {
            GroupContext ctx(r, {m});
            for (int q = qRange.first; q <= qRange.second; ++q) {
                SuiteCase c{{{"m", m}, {"r", r}, {"q", q}}, "pass", json::object()};
                try {
                    bool exists = finite_order_exists(ctx, q);
                    c.detail["exists"] = exists;
                    if (exists) {
                        c.detail["mode"] = "proof";
                        auto f = finite_order_element(ctx, q, 1);
                        bool ok = f && power(*f, q).is_identity() && membership(*f, ctx);
                        std::optional<RationalRho> rho;
                        if (f) rho = exact_rational_rho(*f);
                        ok = ok && rho && *rho == make_rational_rho(Rational(1) / Rational(q));
                        if (!ok) c.verdict = "fail", c.detail["reason"] = "constructive verification failed";
                    } else {
                        c.detail["mode"] = "evidence";
                        std::uint64_t caseSeed = seed ^ (std::uint64_t(m) << 40) ^ (std::uint64_t(r) << 20) ^
                                                 std::uint64_t(q);
                        int sampled = 0;
                        for (unsigned s = 0; s < samplesPerCase; ++s) {
                            PLCircleMap w = random_word({detail::standard_generators(ctx), 8, caseSeed + s});
                            auto rho = exact_rational_rho(w, 16);
                            if (!rho) continue;
                            ++sampled;
                            if (rho->q == q) {
                                c.verdict = "fail";
                                c.detail["reason"] = "sampled a rotation number with forbidden denominator";
                            }
                        }
                        c.detail["samples"] = sampled;
                    }
                } catch (const Error& e) {
                    c.verdict = "fail";
                    c.detail["reason"] = e.what();
                }
                rep.cases.push_back(std::move(c));
            }
        }
    }
    rep.runtimeMs = watch.ms();
    return rep;
}

/// Theorem 2A/B/C': Stein families, the rank certificate, the rank-p obstruction,
/// and a realize_log_ratio spot check per basis.
inline SuiteReport run_thm2_suite(const std::vector<std::vector<Integer>>& bases, std::pair<int, int> kRange,
                                  std::uint64_t seed = 1) {
    detail::StopWatch watch;
    SuiteReport rep{"thm2", seed, {}, 0};
    for (const auto& basis : bases) {
        json basisJson = json::array();
        for (const auto& n : basis) basisJson.push_back(n.str());
        GroupContext ctx(1, basis);
        PiResult pi = find_pi(ctx);
        for (int k = kRange.first; k <= kRange.second; ++k) {
            SuiteCase c{{{"basis", basisJson}, {"k", k}, {"check", "stein_family"}}, "pass", json::object()};
            try {
                auto fam = stein_family(ctx, k);
                GroupContext cr = ctx.with_r(fam.front().r());
                bool ok = true;
                for (const auto& f : fam) {
                    ok = ok && membership(f, cr);
                    ok = ok && (f.is_identity() || f.jump_at(0) == pi.Pi);
                }
                for (std::size_t i = 0; i < fam.size(); ++i)
                    for (std::size_t j = i + 1; j < fam.size(); ++j)
                        ok = ok && compose(fam[i], fam[j]) == compose(fam[j], fam[i]);
                c.detail["Pi"] = pi.Pi.str();
                if (!ok) c.verdict = "fail", c.detail["reason"] = "family invariant violated";
            } catch (const Error& e) {
                c.verdict = "fail";
                c.detail["reason"] = e.what();
            }
            rep.cases.push_back(std::move(c));
        }

        SuiteCase fa{{{"basis", basisJson}, {"check", "free_abelian_witness"}}, "pass", json::object()};
        try {
            if (basis.size() < 2) {
                fa.verdict = "skip";
                fa.detail["reason"] = "rank p-1 = 0";
            } else {
                auto cert = free_abelian_witness(ctx, 1);
                bool ok = cert.rank == basis.size() - 1 && qindependence_check(cert.rhos);
                fa.detail["rank"] = cert.rank;
                if (!ok) fa.verdict = "fail", fa.detail["reason"] = "certificate invariant violated";
            }
        } catch (const Error& e) {
            fa.verdict = "fail";
            fa.detail["reason"] = e.what();
        }
        rep.cases.push_back(std::move(fa));

        SuiteCase ob{{{"basis", basisJson}, {"check", "rank_obstruction"}}, "pass", json::object()};
        try {
            std::vector<LogRatio> all;
            bool degenerate = false;
            for (const auto& n : basis) {
                auto lr = canonical_log_ratio(Rational(n), Rational(pi.Pi));
                if (!std::holds_alternative<LogRatio>(lr)) degenerate = true;
                else all.push_back(std::get<LogRatio>(lr));
            }
            if (degenerate || basis.size() < 2) {
                ob.verdict = "skip";
                ob.detail["reason"] = "a family rotation number is rational";
            } else if (qindependence_check(all)) {
                ob.verdict = "fail";
                ob.detail["reason"] = "rank p obstruction not detected";
            }
        } catch (const Error& e) {
            ob.verdict = "fail";
            ob.detail["reason"] = e.what();
        }
        rep.cases.push_back(std::move(ob));

        SuiteCase rl{{{"basis", basisJson}, {"check", "realize_log_ratio"}}, "pass", json::object()};
        try {
            if (Rational(basis.back()) >= Rational(pi.Pi)) {
                rl.verdict = "skip";
                rl.detail["reason"] = "no alpha with 1 < alpha < Pi";
            } else {
                PLCircleMap f = realize_log_ratio(ctx, Rational(basis.back()), Rational(pi.Pi));
                if (!membership(f, ctx.with_r(f.r()))) rl.verdict = "fail", rl.detail["reason"] = "membership";
                rl.detail["circumference"] = format_rational(f.r());
            }
        } catch (const Error& e) {
            rl.verdict = "fail";
            rl.detail["reason"] = e.what();
        }
        rep.cases.push_back(std::move(rl));
    }
    rep.runtimeMs = watch.ms();
    return rep;
}

/// Lemma 2: Boshernitzan normal form round trip on (map, context) inputs, with
/// pi-invariant equality across exactly-commuting pairs.
inline SuiteReport run_lemma2_suite(const std::vector<std::pair<PLCircleMap, GroupContext>>& inputs,
                                    std::uint64_t seed = 1) {
    detail::StopWatch watch;
    SuiteReport rep{"lemma2", seed, {}, 0};
    std::vector<std::optional<Rational>> pis(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto& [f, ctx] = inputs[i];
        SuiteCase c{{{"index", i}, {"circumference", format_rational(f.r())}}, "pass", json::object()};
        try {
            DVerdict v = has_D_property(f);
            if (v.kind != DVerdict::Kind::Yes) {
                c.verdict = "skip";
                c.detail["reason"] = v.kind == DVerdict::Kind::No ? "DVerdict No" : "DVerdict Unknown";
            } else {
                auto form = to_boshernitzan(f, 256, ctx);
                pis[i] = form.pi;
                bool ok = form.F.breaks().size() <= 2;
                CertifiedInterval bounds = rho_bounds(f, 10000);
                if (std::holds_alternative<LogRatio>(form.rho)) {
                    Interval v64 = std::get<LogRatio>(form.rho).value_interval(64);
                    ok = ok && bounds.contains(rmod(v64.lo_rational(), 1));
                    c.detail["rho"] = rho_to_json(form.rho);
                } else {
                    const auto& rr = std::get<RationalRho>(form.rho);
                    ok = ok && bounds.contains(Rational(rr.p) / Rational(rr.q));
                    c.detail["rho"] = rho_to_json(form.rho);
                }
                if (!ok) c.verdict = "fail", c.detail["reason"] = "round trip or rho agreement failed";
            }
        } catch (const Error& e) {
            c.verdict = "fail";
            c.detail["reason"] = e.what();
        }
        rep.cases.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        for (std::size_t j = i + 1; j < inputs.size(); ++j) {
            if (!pis[i] || !pis[j]) continue;
            const auto& fi = inputs[i].first;
            const auto& fj = inputs[j].first;
            if (fi.r() != fj.r() || !(compose(fi, fj) == compose(fj, fi))) continue;
            SuiteCase c{{{"check", "pi_equal_commuting"}, {"i", i}, {"j", j}}, "pass", json::object()};
            if (*pis[i] != *pis[j]) {
                c.verdict = "fail";
                c.detail["reason"] = "commuting pair with different pi-invariants";
            }
            rep.cases.push_back(std::move(c));
        }
    }
    rep.runtimeMs = watch.ms();
    return rep;
}

// ---------------------------------------------------------------------------
// Staircase export
// ---------------------------------------------------------------------------

/// CSV "param,lo,hi,exact": rho_bounds per sample, exact p/q when the
/// Stern-Brocot descent resolves within depth 32. Row count = samples.
inline std::string export_staircase(const std::function<PLCircleMap(const Rational&)>& family,
                                    unsigned samples, unsigned long orbitLength = 500) {
    if (samples < 2) fail("BadSampleCount", "samples must be >= 2");
    std::ostringstream out;
    out << "param,lo,hi,exact\n";
    for (unsigned j = 0; j < samples; ++j) {
        Rational t = Rational(Integer(j)) / Rational(Integer(samples - 1));
        PLCircleMap f = family(t);
        CertifiedInterval b = rho_bounds(f, orbitLength);
        out << format_rational(t) << ',' << format_rational(b.lo) << ',' << format_rational(b.hi) << ',';
        if (auto rho = exact_rational_rho(f, 32)) out << format_rational(Rational(rho->p) / rho->q);
        out << '\n';
    }
    return out.str();
}

} // namespace tsg

#endif // TSG_HARNESS_HPP
