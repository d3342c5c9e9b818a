#ifndef TSG_IO_HPP
#define TSG_IO_HPP

#include "tsg/constructions.hpp"

#include <json.hpp>

namespace tsg {

using json = nlohmann::json;

// Rationals travel as strings "p/q" (or "p" when q = 1), sign on the numerator.

inline json map_to_json(const PLCircleMap& f) {
    json pieces = json::array();
    for (const auto& p : f.pieces())
        pieces.push_back({{"left", format_rational(p.left)}, {"slope", format_rational(p.slope)}});
    return {{"circumference", format_rational(f.r())}, {"f0", format_rational(f.f0())}, {"pieces", pieces}};
}

inline PLCircleMap map_from_json(const json& j) {
    if (!j.is_object() || !j.contains("circumference") || !j.contains("f0") || !j.contains("pieces"))
        fail("BadMapJson", "expected {circumference, f0, pieces}");
    std::vector<Piece> pieces;
    for (const auto& p : j.at("pieces"))
        pieces.push_back({parse_rational(p.at("left").get<std::string>()),
                          parse_rational(p.at("slope").get<std::string>())});
    return PLCircleMap::from_pieces(parse_rational(j.at("circumference").get<std::string>()), pieces,
                                    parse_rational(j.at("f0").get<std::string>()));
}

inline json rho_to_json(const RotationNumber& rho) {
    if (std::holds_alternative<RationalRho>(rho)) {
        const auto& r = std::get<RationalRho>(rho);
        return {{"kind", "rational"}, {"p", r.p.str()}, {"q", r.q.str()}};
    }
    if (std::holds_alternative<LogRatio>(rho)) {
        const auto& r = std::get<LogRatio>(rho);
        return {{"kind", "logratio"}, {"alpha", format_rational(r.alpha.value())},
                {"beta", format_rational(r.beta.value())}};
    }
    const auto& iv = std::get<CertifiedInterval>(rho);
    return {{"kind", "interval"},
            {"lo", format_rational(iv.lo)},
            {"hi", format_rational(iv.hi)},
            {"loApprox", iv.lo.convert_to<double>()},
            {"hiApprox", iv.hi.convert_to<double>()}};
}

inline json partition_to_json(const OrbitPartition& part) {
    json classes = json::array();
    for (const auto& cls : part.classes) {
        json iters = json::array();
        for (const auto& x : cls.iterates) iters.push_back(format_rational(x));
        classes.push_back({{"anchor", format_rational(cls.anchor)},
                           {"iterates", iters},
                           {"l", cls.l},
                           {"jumpProduct", format_rational(cls.jumpProduct)},
                           {"closed", cls.closed}});
    }
    return {{"status", part.status == PartitionStatus::Complete ? "complete" : "truncated-at-bound"},
            {"classes", classes}};
}

inline json dverdict_to_json(const DVerdict& v) {
    json out = {{"partition", partition_to_json(v.partition)}};
    switch (v.kind) {
    case DVerdict::Kind::Yes: out["kind"] = "yes"; break;
    case DVerdict::Kind::No:
        out["kind"] = "no";
        if (v.witnessClass) out["witnessClass"] = *v.witnessClass;
        break;
    case DVerdict::Kind::Unknown:
        out["kind"] = "unknown";
        out["bound"] = v.bound;
        break;
    }
    return out;
}

inline json witness_to_json(const BSWitness& w) {
    json pieces = json::array();
    for (const auto& p : w.pieces)
        pieces.push_back({{"left", format_rational(p.left)}, {"slope", format_rational(p.slope)}});
    return {{"sourceLength", format_rational(w.sourceLength)},
            {"targetLength", format_rational(w.targetLength)},
            {"pieces", pieces}};
}

inline BSWitness witness_from_json(const json& j) {
    BSWitness w;
    w.sourceLength = parse_rational(j.at("sourceLength").get<std::string>());
    w.targetLength = parse_rational(j.at("targetLength").get<std::string>());
    for (const auto& p : j.at("pieces"))
        w.pieces.push_back({parse_rational(p.at("left").get<std::string>()),
                            parse_rational(p.at("slope").get<std::string>())});
    if (w.pieces.empty() || w.pieces.front().left != 0) fail("BadWitness", "pieces must start at 0");
    return w;
}

inline json certificate_to_json(const FreeAbelianCertificate& cert) {
    json members = json::array(), rhos = json::array();
    for (const auto& f : cert.members) members.push_back(map_to_json(f));
    for (const auto& r : cert.rhos) rhos.push_back(rho_to_json(RotationNumber{r}));
    return {{"members", members}, {"Pi", cert.Pi.str()}, {"rhos", rhos}, {"rank", cert.rank}};
}

} // namespace tsg

#endif // TSG_IO_HPP
