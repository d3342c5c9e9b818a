// Command-line front end: construct/compose/query piecewise-linear circle maps,
// run theorem suites, import/export JSON and CSV.
//
// Exit codes: 0 success, 1 suite failure, 2 validation error, 3 construction failure.
// stdout carries exactly one JSON document (or nothing on error); logs go to stderr.

#include "tsg/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace tsg;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("FileNotFound", "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail("BadJson", std::string("cannot parse ") + path + ": " + e.what());
    }
    return j;
}

PLCircleMap read_map(const std::string& path) { return map_from_json(read_json_file(path)); }

std::vector<Integer> parse_basis(const std::string& s) {
    std::vector<Integer> basis;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) basis.push_back(Integer(tok));
    }
    if (basis.empty()) fail("BadBasis", "empty basis");
    return basis;
}

std::pair<int, int> parse_range(const std::string& s) {
    auto dots = s.find("..");
    if (dots == std::string::npos) return {std::stoi(s), std::stoi(s)};
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
}

void emit(const json& j) { std::cout << j.dump(2) << std::endl; }

/// Splices `--key value` pairs from a JSON config file right after the
/// subcommand token, so later command-line flags win (options take the last value).
std::vector<std::string> apply_config(std::vector<std::string> args) {
    std::string configPath;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--config") {
            configPath = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
            break;
        }
    }
    if (configPath.empty()) return args;
    json cfg = read_json_file(configPath);
    std::size_t insertAt = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!args[i].empty() && args[i][0] != '-') {
            insertAt = i + 1;
            if (i + 1 < args.size() && !args[i + 1].empty() && args[i + 1][0] != '-' &&
                (args[i] == "construct"))
                ++insertAt; // construct takes a positional kind
            break;
        }
    }
    std::vector<std::string> flags;
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        flags.push_back("--" + it.key());
        if (it.value().is_string()) flags.push_back(it.value().get<std::string>());
        else if (!it.value().is_boolean()) flags.push_back(it.value().dump());
        else if (!it.value().get<bool>()) flags.pop_back();
    }
    args.insert(args.begin() + static_cast<long>(insertAt), flags.begin(), flags.end());
    return args;
}

int run(std::vector<std::string> args) {
    CLI::App app{"Exact arithmetic for piecewise-linear circle maps over Thompson-Stein groups"};
    app.require_subcommand(1);
    // config-file values are spliced in before explicit flags; the last value wins
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    // ---- construct ----
    auto* construct = app.add_subcommand("construct", "Build a map from one of the paper's families");
    std::string kind, cBasis = "2", cR = "1", cL1, cL2, cAngle, cA0, cB0, cX0, cAlpha, cBeta, cM, cQ = "1",
                      cP = "1", cK = "1";
    construct->add_option("kind", kind, "boshernitzan|rotation|bump|finite-order|stein-family|log-ratio")
        ->required();
    construct->add_option("--basis", cBasis, "comma-separated slope basis");
    construct->add_option("--r", cR, "circumference");
    construct->add_option("--l1", cL1, "first slope");
    construct->add_option("--l2", cL2, "second slope");
    construct->add_option("--angle", cAngle, "rotation amount");
    construct->add_option("--a0", cA0);
    construct->add_option("--b0", cB0);
    construct->add_option("--x0", cX0);
    construct->add_option("--alpha", cAlpha);
    construct->add_option("--beta", cBeta);
    construct->add_option("--m", cM, "single slope base (finite-order)");
    construct->add_option("--q", cQ, "order");
    construct->add_option("--p", cP, "rotation numerator");
    construct->add_option("--k", cK, "family index / bump slope");

    // ---- unary/binary map operations ----
    std::string mapPath, rhsPath, witnessPath, xValue, nValue = "1";
    auto* composeCmd = app.add_subcommand("compose", "Compose two maps (lhs after rhs)");
    composeCmd->add_option("--lhs", mapPath)->required();
    composeCmd->add_option("--rhs", rhsPath)->required();
    auto* invertCmd = app.add_subcommand("invert", "Invert a map");
    invertCmd->add_option("--map", mapPath)->required();
    auto* powerCmd = app.add_subcommand("power", "Iterate a map");
    powerCmd->add_option("--map", mapPath)->required();
    powerCmd->add_option("--n", nValue)->required();
    auto* evalCmd = app.add_subcommand("eval", "Evaluate the canonical lift and circle image");
    evalCmd->add_option("--map", mapPath)->required();
    evalCmd->add_option("--x", xValue)->required();

    // ---- rho ----
    auto* rhoCmd = app.add_subcommand("rho", "Rotation number: exact, interval, or symbolic");
    std::string rhoMode = "exact", rhoBasis, rhoDepth = "64", rhoIters = "10000", rhoMaxIter = "256";
    rhoCmd->add_option("--map", mapPath)->required();
    rhoCmd->add_option("--mode", rhoMode, "exact|interval|symbolic");
    rhoCmd->add_option("--depth", rhoDepth, "Stern-Brocot depth (exact mode)");
    rhoCmd->add_option("--iters", rhoIters, "orbit length (interval mode)");
    rhoCmd->add_option("--max-iter", rhoMaxIter, "orbit bound (symbolic mode)");
    rhoCmd->add_option("--basis", rhoBasis, "group basis (symbolic mode)");

    // ---- member / dcheck / linearize ----
    auto* memberCmd = app.add_subcommand("member", "Thompson-Stein group membership");
    std::string memberBasis;
    memberCmd->add_option("--map", mapPath)->required();
    memberCmd->add_option("--basis", memberBasis)->required();
    auto* dcheckCmd = app.add_subcommand("dcheck", "(D)-property verdict with the break-orbit partition");
    std::string dcheckIter = "256";
    dcheckCmd->add_option("--map", mapPath)->required();
    dcheckCmd->add_option("--max-iter", dcheckIter);
    auto* linCmd = app.add_subcommand("linearize", "Certified check of the h_sigma linearization");
    std::string linSamples = "16", linBits = "128";
    linCmd->add_option("--map", mapPath)->required();
    linCmd->add_option("--samples", linSamples);
    linCmd->add_option("--bits", linBits);

    // ---- bs-witness / transport ----
    auto* bsCmd = app.add_subcommand("bs-witness", "Bieri-Strebel interval equivalence witness");
    std::string bsL, bsLp, bsBasis;
    bsCmd->add_option("--l", bsL)->required();
    bsCmd->add_option("--lp", bsLp)->required();
    bsCmd->add_option("--basis", bsBasis)->required();
    auto* transportCmd = app.add_subcommand("transport", "Conjugate a map along a witness");
    transportCmd->add_option("--map", mapPath)->required();
    transportCmd->add_option("--witness", witnessPath)->required();

    // ---- suite / export-staircase ----
    auto* suiteCmd = app.add_subcommand("suite", "Run a theorem verification suite");
    std::string suiteName, suiteM = "2..6", suiteR = "1..6", suiteQ = "1..12", suiteBases = "2,3;3,5;2,3,5",
                suiteK = "1..2", suiteSeed = "1", suiteOut;
    suiteCmd->add_option("name", suiteName, "thm1|thm2|lemma2")->required();
    suiteCmd->add_option("--m", suiteM, "m range a..b (thm1)");
    suiteCmd->add_option("--r", suiteR, "r range a..b (thm1)");
    suiteCmd->add_option("--q", suiteQ, "q range a..b (thm1)");
    suiteCmd->add_option("--bases", suiteBases, "semicolon-separated bases (thm2/lemma2)");
    suiteCmd->add_option("--k", suiteK, "k range a..b (thm2)");
    suiteCmd->add_option("--seed", suiteSeed);
    suiteCmd->add_option("--out", suiteOut, "also write the report to this file");
    auto* stairCmd = app.add_subcommand("export-staircase", "CSV of rho bounds over a parametrized family");
    std::string stairFamily = "rotation", stairSamples = "101", stairOrbit = "500", stairOut;
    stairCmd->add_option("--family", stairFamily, "rotation|boshernitzan");
    stairCmd->add_option("--samples", stairSamples);
    stairCmd->add_option("--orbit", stairOrbit, "orbit length for rho_bounds");
    stairCmd->add_option("--out", stairOut, "CSV output path")->required();

    std::vector<const char*> argv;
    argv.push_back("tsg");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (construct->parsed()) {
        try {
            if (kind == "boshernitzan") {
                emit(map_to_json(boshernitzan(parse_rational(cR), parse_rational(cL1), parse_rational(cL2))));
            } else if (kind == "rotation") {
                emit(map_to_json(PLCircleMap::rotation(parse_rational(cR), parse_rational(cAngle))));
            } else if (kind == "bump") {
                GroupContext ctx(parse_rational(cR), parse_basis(cBasis));
                emit(map_to_json(bump_alpha(ctx, Integer(cK), parse_rational(cA0), parse_rational(cB0),
                                            parse_rational(cX0), parse_rational(cAlpha))));
            } else if (kind == "finite-order") {
                GroupContext ctx(parse_rational(cR), {Integer(cM)});
                auto f = finite_order_element(ctx, Integer(cQ), Integer(cP));
                if (!f) {
                    std::cerr << "NotRealizable: gcd(m-1, q) does not divide r" << std::endl;
                    return 3;
                }
                emit(map_to_json(*f));
            } else if (kind == "stein-family") {
                GroupContext ctx(1, parse_basis(cBasis));
                json out = json::array();
                for (const auto& f : stein_family(ctx, Integer(cK))) out.push_back(map_to_json(f));
                emit(out);
            } else if (kind == "log-ratio") {
                GroupContext ctx(1, parse_basis(cBasis));
                emit(map_to_json(realize_log_ratio(ctx, parse_rational(cAlpha), parse_rational(cBeta))));
            } else {
                std::cerr << "unknown construct kind: " << kind << std::endl;
                return 2;
            }
        } catch (const Error& e) {
            std::cerr << e.what() << std::endl;
            return 3;
        }
        return 0;
    }

    try {
        if (composeCmd->parsed()) {
            emit(map_to_json(compose(read_map(mapPath), read_map(rhsPath))));
        } else if (invertCmd->parsed()) {
            emit(map_to_json(invert(read_map(mapPath))));
        } else if (powerCmd->parsed()) {
            emit(map_to_json(power(read_map(mapPath), std::stol(nValue))));
        } else if (evalCmd->parsed()) {
            PLCircleMap f = read_map(mapPath);
            Rational x = parse_rational(xValue);
            emit({{"x", format_rational(x)},
                  {"lift", format_rational(f.evaluate(x))},
                  {"image", format_rational(f.image(rmod(x, f.r())))}});
        } else if (rhoCmd->parsed()) {
            PLCircleMap f = read_map(mapPath);
            if (rhoMode == "exact") {
                if (auto rho = exact_rational_rho(f, static_cast<unsigned>(std::stoul(rhoDepth))))
                    emit(rho_to_json(RotationNumber{*rho}));
                else emit({{"kind", "absent"}, {"reason", "DepthExhausted"}});
            } else if (rhoMode == "interval") {
                CertifiedInterval b = rho_bounds(f, std::stoul(rhoIters));
                emit(rho_to_json(RotationNumber{b}));
            } else if (rhoMode == "symbolic") {
                if (rhoBasis.empty()) fail("BadArguments", "symbolic mode needs --basis");
                GroupContext ctx(f.r(), parse_basis(rhoBasis));
                try {
                    auto form = to_boshernitzan(f, std::stoul(rhoMaxIter), ctx);
                    emit(rho_to_json(form.rho));
                } catch (const Error& e) {
                    if (std::string(e.code()) == "DNotSatisfied")
                        emit({{"kind", "absent"}, {"reason", "DNotSatisfied"}});
                    else throw;
                }
            } else {
                fail("BadArguments", "unknown rho mode " + rhoMode);
            }
        } else if (memberCmd->parsed()) {
            PLCircleMap f = read_map(mapPath);
            GroupContext ctx(f.r(), parse_basis(memberBasis));
            emit({{"member", membership(f, ctx)}});
        } else if (dcheckCmd->parsed()) {
            emit(dverdict_to_json(has_D_property(read_map(mapPath), std::stoul(dcheckIter))));
        } else if (linCmd->parsed()) {
            bool ok = verify_linearization(read_map(mapPath), static_cast<unsigned>(std::stoul(linSamples)),
                                           static_cast<unsigned>(std::stoul(linBits)));
            emit({{"verified", ok}});
        } else if (bsCmd->parsed()) {
            GroupContext ctx(1, parse_basis(bsBasis));
            auto w = bs_witness(parse_rational(bsL), parse_rational(bsLp), ctx);
            if (!w) emit({{"kind", "absent"}, {"reason", "NotEquivalent"}});
            else {
                validate_bs_witness(*w, ctx);
                emit(witness_to_json(*w));
            }
        } else if (transportCmd->parsed()) {
            emit(map_to_json(transport(read_map(mapPath), witness_from_json(read_json_file(witnessPath)))));
        } else if (suiteCmd->parsed()) {
            SuiteReport rep;
            std::uint64_t seed = std::stoull(suiteSeed);
            if (suiteName == "thm1") {
                rep = run_thm1_suite(parse_range(suiteM), parse_range(suiteR), parse_range(suiteQ), seed);
            } else if (suiteName == "thm2" || suiteName == "lemma2") {
                std::vector<std::vector<Integer>> bases;
                std::stringstream ss(suiteBases);
                std::string tok;
                while (std::getline(ss, tok, ';'))
                    if (!tok.empty()) bases.push_back(parse_basis(tok));
                if (suiteName == "thm2") {
                    rep = run_thm2_suite(bases, parse_range(suiteK), seed);
                } else {
                    std::vector<std::pair<PLCircleMap, GroupContext>> inputs;
                    for (const auto& basis : bases) {
                        GroupContext ctx(1, basis);
                        auto fam = stein_family(ctx, 1);
                        GroupContext cr = ctx.with_r(fam.front().r());
                        for (const auto& f : fam) inputs.push_back({f, cr});
                        inputs.push_back({PLCircleMap::rotation(cr.r, 1), cr});
                    }
                    rep = run_lemma2_suite(inputs, seed);
                }
            } else {
                std::cerr << "unknown suite: " << suiteName << std::endl;
                return 2;
            }
            json out = rep.to_json();
            if (!suiteOut.empty()) {
                std::ofstream f(suiteOut);
                f << out.dump(2) << '\n';
            }
            emit(out);
            return rep.all_passed() ? 0 : 1;
        } else if (stairCmd->parsed()) {
            std::function<PLCircleMap(const Rational&)> family;
            if (stairFamily == "rotation") {
                family = [](const Rational& t) { return PLCircleMap::rotation(1, t); };
            } else if (stairFamily == "boshernitzan") {
                // lambda1 = 2 fixed, lambda2 sweeps (1/4, 3/4)
                family = [](const Rational& t) {
                    return boshernitzan(1, 2, Rational(1) / 4 + t / 2);
                };
            } else {
                fail("BadArguments", "unknown family " + stairFamily);
            }
            std::string csv = export_staircase(family, static_cast<unsigned>(std::stoul(stairSamples)),
                                               std::stoul(stairOrbit));
            std::ofstream f(stairOut);
            if (!f) fail("FileNotFound", "cannot write " + stairOut);
            f << csv;
            emit({{"written", stairOut},
                  {"rows", static_cast<long>(std::count(csv.begin(), csv.end(), '\n')) - 1}});
        }
    } catch (const Error& e) {
        std::cerr << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << std::endl;
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = apply_config(std::move(args));
    } catch (const tsg::Error& e) {
        std::cerr << e.what() << std::endl;
        return 2;
    }
    return run(std::move(args));
}
