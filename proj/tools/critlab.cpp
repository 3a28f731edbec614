// critlab: construct the example mappings, evaluate their derivatives,
// integrate their energies, estimate near-critical dimensions and run the
// verification scans, from one binary with JSON/CSV artifacts.

#include "critlab/calculus.hpp"
#include "critlab/cantor.hpp"
#include "critlab/dimension.hpp"
#include "critlab/map.hpp"
#include "critlab/quadrature.hpp"
#include "critlab/regimes.hpp"
#include "critlab/runio.hpp"
#include "critlab/verify.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

using namespace critlab;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPrecondition = 2;
constexpr int kExitBudget = 3;

// JSON number that survives non-finite values (dump() would emit null).
json jnum(double v) {
    if (std::isfinite(v)) return v;
    return fmt17(v);
}

json vecJson(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(jnum(v[i]));
    return a;
}

Vec parsePoint(const std::string& s) {
    Vec x(0);
    std::stringstream ss(s);
    std::string item;
    int n = 0;
    while (std::getline(ss, item, ',')) {
        if (n >= kMaxDim) throw PreconditionError("point: too many coordinates");
        x.c[n++] = std::stod(item);
    }
    x.n = n;
    if (n == 0) throw PreconditionError("point: empty");
    return x;
}

RangeSpec parseRange(const std::string& s) {
    RangeSpec r;
    const auto c1 = s.find(':');
    if (c1 == std::string::npos) {
        r.lo = r.hi = std::stod(s);
        r.step = 1.0;
        return r;
    }
    const auto c2 = s.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw PreconditionError("range: expected value or lo:hi:step, got " + s);
    r.lo = std::stod(s.substr(0, c1));
    r.hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    r.step = std::stod(s.substr(c2 + 1));
    return r;
}

Cube parseBox(const std::string& s, int n) {
    Vec all = parsePoint(s);
    if (all.size() != 2 * n)
        throw PreconditionError("box: expected " + std::to_string(2 * n) + " comma values");
    Cube b{Vec(n), Vec(n)};
    for (int c = 0; c < n; ++c) {
        b.lo[c] = all[c];
        b.hi[c] = all[n + c];
        if (!(b.lo[c] < b.hi[c])) throw PreconditionError("box: lo must be below hi");
    }
    return b;
}

int resolveThreads(int flag) {
    if (flag == 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        flag = hw ? static_cast<int>(hw) : 1;
    }
    return threadCount(flag);
}

void emit(const json& j, const std::string& outPath) {
    if (!outPath.empty()) writeJsonFile(outPath, j);
    std::cout << j.dump(2) << std::endl;
}

json verdictJson(const RegimeParams& p) {
    const DerivedExponents e = derive_exponents(p);
    const RegimeVerdict v = classify(p);
    json row{{"n", p.n},
             {"q", p.q},
             {"a", p.a},
             {"d", p.d},
             {"beta", e.beta},
             {"seriesExpD2", e.seriesExpD2},
             {"seriesExpJac", e.seriesExpJac},
             {"hkApplies", v.hkApplies},
             {"mainApplies", v.mainApplies},
             {"criticalSetNull", v.criticalSetNull},
             {"signConstant", v.signConstant},
             {"counterexampleExists", v.counterexampleExists},
             {"undeterminedGap", v.undeterminedGap},
             {"notes", v.notes}};
    if (e.b) row["b"] = *e.b;
    return row;
}

struct Common {
    std::string mapPath, outPath;
    int threads = 1;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for second-gradient mappings with controlled critical sets"};
    app.require_subcommand(1);

    RunManifest manifest;
    for (int i = 0; i < argc; ++i) manifest.argv.push_back(argv[i]);
    Timer timer;

    std::function<int()> run;

    // ---- classify ----------------------------------------------------
    {
        auto* cmd = app.add_subcommand("classify", "regime verdict for one (n,q,a,d)");
        auto n = std::make_shared<int>(2);
        auto q = std::make_shared<double>(2.0), a = std::make_shared<double>(1.0),
             d = std::make_shared<double>(1.0);
        auto out = std::make_shared<std::string>();
        cmd->add_option("--n", *n, "ambient dimension")->required();
        cmd->add_option("--q", *q, "second-gradient exponent")->required();
        cmd->add_option("--a", *a, "inverse-Jacobian exponent")->required();
        cmd->add_option("--d", *d, "critical-set dimension")->required();
        cmd->add_option("--out", *out, "write JSON here too");
        cmd->callback([&, n, q, a, d, out]() {
            run = [&, n, q, a, d, out]() {
                RegimeParams p{*n, *q, *a, *d};
                p.validate();
                json j = verdictJson(p);
                manifest.wallSeconds = timer.seconds();
                j["manifest"] = manifest.toJson();
                emit(j, *out);
                return kExitOk;
            };
        });
    }

    // ---- sweep --------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("sweep", "regime grid over (q,a,d) ranges to CSV");
        auto n = std::make_shared<int>(2);
        auto qs = std::make_shared<std::string>(), as = std::make_shared<std::string>(),
             ds = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        cmd->add_option("--n", *n)->required();
        cmd->add_option("--q", *qs, "lo:hi:step or value")->required();
        cmd->add_option("--a", *as, "lo:hi:step or value")->required();
        cmd->add_option("--d", *ds, "lo:hi:step or value")->required();
        cmd->add_option("--out", *out, "CSV path")->required();
        cmd->callback([&, n, qs, as, ds, out]() {
            run = [&, n, qs, as, ds, out]() {
                const auto rows = sweep(*n, parseRange(*qs), parseRange(*as), parseRange(*ds));
                CsvTable t;
                t.header = {"n",  "q",    "a",        "d",          "b",      "beta",
                            "hk", "main", "critnull", "signconst",  "counterex"};
                for (const auto& r : rows) {
                    t.rows.push_back({std::to_string(r.params.n), fmt17(r.params.q),
                                      fmt17(r.params.a), fmt17(r.params.d),
                                      r.exps.b ? fmt17(*r.exps.b) : "",
                                      fmt17(r.exps.beta),
                                      r.verdict.hkApplies ? "1" : "0",
                                      r.verdict.mainApplies ? "1" : "0",
                                      r.verdict.criticalSetNull ? "1" : "0",
                                      r.verdict.signConstant ? "1" : "0",
                                      r.verdict.counterexampleExists ? "1" : "0"});
                }
                manifest.tolerances = {{"rows", rows.size()}};
                manifest.wallSeconds = timer.seconds();
                writeCsvFile(*out, t, manifest);
                std::cout << "wrote " << rows.size() << " rows to " << *out << std::endl;
                return kExitOk;
            };
        });
    }

    // ---- eval -----------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("eval", "evaluate a map at a point");
        auto com = std::make_shared<Common>();
        auto pt = std::make_shared<std::string>();
        cmd->add_option("--map", com->mapPath, "map spec JSON")->required();
        cmd->add_option("--point", *pt, "comma separated coordinates")->required();
        cmd->add_option("--out", com->outPath);
        cmd->callback([&, com, pt]() {
            run = [&, com, pt]() {
                auto f = loadMap(com->mapPath);
                manifest.mapDigest = specDigest(f->spec());
                const Vec x = parsePoint(*pt);
                const Vec y = f->value(x);
                json j{{"family", f->family()},
                       {"point", vecJson(x)},
                       {"value", vecJson(y)},
                       {"jac", jnum(f->jac(x))},
                       {"d2Norm", jnum(f->d2Norm(x))},
                       {"dfMaxEntry", jnum(f->grad(x).maxAbsEntry())},
                       {"singularDistance", jnum(f->singularDistance(x))},
                       {"distortion", jnum(distortion(*f, x))},
                       {"loci", f->lociDescription()}};
                manifest.wallSeconds = timer.seconds();
                j["manifest"] = manifest.toJson();
                emit(j, com->outPath);
                return kExitOk;
            };
        });
    }

    // ---- diffcheck -------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("diffcheck", "closed-form vs finite-difference derivatives");
        auto com = std::make_shared<Common>();
        auto pt = std::make_shared<std::string>();
        auto step = std::make_shared<double>(1e-5);
        auto standoff = std::make_shared<double>(1e-3);
        auto noRich = std::make_shared<bool>(false);
        cmd->add_option("--map", com->mapPath)->required();
        cmd->add_option("--point", *pt)->required();
        cmd->add_option("--step", *step, "fd step");
        cmd->add_option("--standoff", *standoff, "required singular distance");
        cmd->add_flag("--no-richardson", *noRich);
        cmd->add_option("--out", com->outPath);
        cmd->callback([&, com, pt, step, standoff, noRich]() {
            run = [&, com, pt, step, standoff, noRich]() {
                auto f = loadMap(com->mapPath);
                manifest.mapDigest = specDigest(f->spec());
                const Vec x = parsePoint(*pt);
                DiffConfig cfg;
                cfg.step = *step;
                cfg.singularStandoff = *standoff;
                cfg.richardson = !*noRich;
                const Mat gc = f->grad(x);
                const Mat gf = fd_gradient(*f, x, cfg);
                const double jc = f->jac(x), jf = det(gf);
                const double d2c = f->d2Norm(x), d2f = fd_hessian_norm(*f, x, cfg);
                double gradErr = 0.0;
                for (int r = 0; r < f->dim(); ++r)
                    for (int c = 0; c < f->dim(); ++c)
                        gradErr = std::max(gradErr, std::abs(gc(r, c) - gf(r, c)));
                json j{{"point", vecJson(x)},
                       {"jacClosed", jnum(jc)},
                       {"jacFd", jnum(jf)},
                       {"jacRelErr", jnum(std::abs(jc - jf) / std::max(std::abs(jc), 1e-300))},
                       {"gradMaxAbsErr", jnum(gradErr)},
                       {"d2Closed", jnum(d2c)},
                       {"d2Fd", jnum(d2f)},
                       {"d2Ratio", jnum(d2f / std::max(d2c, 1e-300))}};
                manifest.tolerances = {{"step", cfg.step},
                                       {"richardson", cfg.richardson},
                                       {"standoff", cfg.singularStandoff}};
                manifest.wallSeconds = timer.seconds();
                j["manifest"] = manifest.toJson();
                emit(j, com->outPath);
                return kExitOk;
            };
        });
    }

    // ---- cantor ---------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("cantor", "squeeze-construction helpers");
        cmd->require_subcommand(1);

        auto* bld = cmd->add_subcommand("build", "write a schedule spec");
        auto n = std::make_shared<int>(2);
        auto q = std::make_shared<double>(3.0), a = std::make_shared<double>(1.0),
             d = std::make_shared<double>(1.0);
        auto gen = std::make_shared<int>(6);
        auto out = std::make_shared<std::string>();
        bld->add_option("--n", *n)->required();
        bld->add_option("--q", *q)->required();
        bld->add_option("--a", *a)->required();
        bld->add_option("--d", *d)->required();
        bld->add_option("--maxgen", *gen, "generations to instantiate");
        bld->add_option("--out", *out, "spec JSON path")->required();
        bld->callback([&, n, q, a, d, gen, out]() {
            run = [&, n, q, a, d, gen, out]() {
                RegimeParams p{*n, *q, *a, *d};
                CantorSchedule s = CantorSchedule::build(p, *gen);
                CantorMap m(std::move(s));
                const json spec = m.spec();
                writeJsonFile(*out, spec);
                json j{{"spec", spec},
                       {"digest", specDigest(spec)},
                       {"beta", m.schedule().beta()},
                       {"slopeRatio", m.schedule().slopeRatio()},
                       {"minSingularHint", m.minSingularHint()},
                       {"glueExact", std::exp2(-static_cast<double>(*n) / *d) <= 0.3}};
                j["regime"] = verdictJson(p);
                manifest.mapDigest = specDigest(spec);
                manifest.wallSeconds = timer.seconds();
                j["manifest"] = manifest.toJson();
                std::cout << j.dump(2) << std::endl;
                return kExitOk;
            };
        });

        auto* ev = cmd->add_subcommand("eval", "evaluate with cell-descent details");
        auto com = std::make_shared<Common>();
        auto pt = std::make_shared<std::string>();
        ev->add_option("--map", com->mapPath)->required();
        ev->add_option("--point", *pt)->required();
        ev->add_option("--out", com->outPath);
        ev->callback([&, com, pt]() {
            run = [&, com, pt]() {
                auto f = loadMap(com->mapPath);
                auto* cm = dynamic_cast<CantorMap*>(f.get());
                if (!cm) throw PreconditionError("cantor eval: map is not a squeeze construction");
                manifest.mapDigest = specDigest(f->spec());
                const Vec x = parsePoint(*pt);
                int level = 0;
                Vec z, zt;
                cm->descend(x, level, z, zt);
                json j{{"point", vecJson(x)},
                       {"value", vecJson(f->value(x))},
                       {"jac", jnum(f->jac(x))},
                       {"d2Norm", jnum(f->d2Norm(x))},
                       {"level", level},
                       {"cellCenter", vecJson(z)},
                       {"imageCenter", vecJson(zt)},
                       {"singularDistance", jnum(f->singularDistance(x))}};
                manifest.wallSeconds = timer.seconds();
                j["manifest"] = manifest.toJson();
                emit(j, com->outPath);
                return kExitOk;
            };
        });

        auto* cl = cmd->add_subcommand("cells", "enumerate one generation to CSV");
        auto com2 = std::make_shared<Common>();
        auto g2 = std::make_shared<int>(1);
        cl->add_option("--map", com2->mapPath)->required();
        cl->add_option("--gen", *g2)->required();
        cl->add_option("--out", com2->outPath, "CSV path")->required();
        cl->callback([&, com2, g2]() {
            run = [&, com2, g2]() {
                auto f = loadMap(com2->mapPath);
                auto* cm = dynamic_cast<CantorMap*>(f.get());
                if (!cm) throw PreconditionError("cantor cells: map is not a squeeze construction");
                manifest.mapDigest = specDigest(f->spec());
                const auto cells = cantor_set_points(cm->schedule(), *g2);
                const int n = cm->dim();
                CsvTable t;
                t.header = {"gen", "word"};
                for (int c = 0; c < n; ++c) t.header.push_back("zv" + std::to_string(c));
                for (int c = 0; c < n; ++c) t.header.push_back("ztv" + std::to_string(c));
                t.header.insert(t.header.end(), {"qvHalf", "rvLastHalf"});
                for (const auto& cell : cells) {
                    std::vector<std::string> row{std::to_string(cell.gen), ""};
                    std::string w;
                    for (int b : cell.word) {
                        if (!w.empty()) w += '-';
                        w += std::to_string(b);
                    }
                    row[1] = w;
                    for (int c = 0; c < n; ++c) row.push_back(fmt17(cell.zv[c]));
                    for (int c = 0; c < n; ++c) row.push_back(fmt17(cell.ztv[c]));
                    row.push_back(fmt17(0.5 * cell.Qv.side(0)));
                    row.push_back(fmt17(0.5 * cell.Rv.side(n - 1)));
                    t.rows.push_back(std::move(row));
                }
                manifest.wallSeconds = timer.seconds();
                writeCsvFile(com2->outPath, t, manifest);
                std::cout << "wrote " << cells.size() << " cells to " << com2->outPath
                          << std::endl;
                return kExitOk;
            };
        });
    }

    // ---- energy -----------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "energy", "energy of a map (squeeze maps default to the generation series)");
        auto com = std::make_shared<Common>();
        auto q = std::make_shared<double>(2.0), a = std::make_shared<double>(1.0);
        auto tol = std::make_shared<double>(1e-3);
        auto maxCells = std::make_shared<long>(400000);
        auto seriesGens = std::make_shared<int>(-1);
        auto full = std::make_shared<bool>(false);
        auto seriesCsv = std::make_shared<std::string>();
        auto psi = std::make_shared<std::string>("maxentry");
        auto phi = std::make_shared<std::string>("absdet");
        cmd->add_option("--map", com->mapPath)->required();
        cmd->add_option("--q", *q)->required();
        cmd->add_option("--a", *a)->required();
        cmd->add_option("--tol", *tol, "relative tolerance");
        cmd->add_option("--max-cells", *maxCells, "cell budget");
        cmd->add_option("--threads", com->threads, "0 = machine parallelism");
        cmd->add_option("--series-gens", *seriesGens,
                        "squeeze maps: analytic series with this many numeric generations");
        cmd->add_flag("--full", *full,
                      "integrate the glued map over its whole domain even for squeeze maps");
        cmd->add_option("--series-csv", *seriesCsv, "per-generation CSV path");
        cmd->add_option("--psi", *psi)->check(CLI::IsMember({"maxentry", "frobenius"}));
        cmd->add_option("--phi", *phi)->check(CLI::IsMember({"absdet", "det"}));
        cmd->add_option("--out", com->outPath);
        cmd->callback([&, com, q, a, tol, maxCells, seriesGens, full, seriesCsv, psi, phi]() {
            run = [&, com, q, a, tol, maxCells, seriesGens, full, seriesCsv, psi, phi]() {
                auto f = loadMap(com->mapPath);
                manifest.mapDigest = specDigest(f->spec());
                EnergyParams p;
                p.q = *q;
                p.a = *a;
                p.tolRel = *tol;
                p.maxCells = *maxCells;
                p.psi = (*psi == "frobenius") ? PsiKind::FrobeniusQ : PsiKind::MaxEntryQ;
                p.phi = (*phi == "det") ? PhiKind::DetNegA : PhiKind::AbsDetNegA;
                const int threads = resolveThreads(com->threads);
                manifest.threads = threads;
                manifest.tolerances = {{"q", p.q},
                                       {"a", p.a},
                                       {"tolRel", p.tolRel},
                                       {"maxCells", p.maxCells},
                                       {"psi", *psi},
                                       {"phi", *phi}};

                EnergyReport rep;
                auto* cm = dynamic_cast<CantorMap*>(f.get());
                if (*seriesGens >= 0) {
                    if (!cm)
                        throw PreconditionError("energy --series-gens needs a squeeze map");
                    rep = cantor_series(cm->schedule(), p, *seriesGens, threads);
                } else if (cm && !*full) {
                    // Whole-domain refinement would have to chase generation-k
                    // features at scale a_k/16 from a size-2 box; the series
                    // decomposition certifies each annulus directly.
                    rep = cantor_series(cm->schedule(), p, cm->schedule().maxGen(), threads);
                } else {
                    rep = energy(*f, p, f->domain(), threads);
                }

                json j{{"d2Integral", jnum(rep.d2Integral)},
                       {"jacNegIntegral", jnum(rep.jacNegIntegral)},
                       {"d2ErrEst", jnum(rep.d2ErrEst)},
                       {"jacErrEst", jnum(rep.jacErrEst)},
                       {"converged", rep.converged},
                       {"d2Converged", rep.d2Converged},
                       {"jacConverged", rep.jacConverged},
                       {"cellsUsed", rep.cellsUsed}};
                if (!rep.perGeneration.empty()) {
                    json gens = json::array();
                    for (const auto& t : rep.perGeneration)
                        gens.push_back({{"i", t.i},
                                        {"analyticD2", jnum(t.analyticD2)},
                                        {"analyticJac", jnum(t.analyticJac)},
                                        {"numericD2", jnum(t.numericD2)},
                                        {"numericJac", jnum(t.numericJac)}});
                    j["perGeneration"] = gens;
                }
                manifest.wallSeconds = timer.seconds();
                j["manifest"] = manifest.toJson();
                emit(j, com->outPath);

                if (!seriesCsv->empty() && !rep.perGeneration.empty()) {
                    CsvTable t;
                    t.header = {"i", "analyticD2", "analyticJac", "numericD2", "numericJac"};
                    for (const auto& g : rep.perGeneration)
                        t.rows.push_back({std::to_string(g.i), fmt17(g.analyticD2),
                                          fmt17(g.analyticJac), fmt17(g.numericD2),
                                          fmt17(g.numericJac)});
                    writeCsvFile(*seriesCsv, t, manifest);
                }
                return rep.converged ? kExitOk : kExitBudget;
            };
        });
    }

    // ---- dimension ---------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("dimension", "near-critical box-count slope");
        auto com = std::make_shared<Common>();
        auto depth = std::make_shared<int>(8);
        cmd->add_option("--map", com->mapPath)->required();
        cmd->add_option("--depth", *depth, "finest grid 2^depth per axis")->required();
        cmd->add_option("--out", com->outPath, "CSV path");
        cmd->callback([&, com, depth]() {
            run = [&, com, depth]() {
                auto f = loadMap(com->mapPath);
                manifest.mapDigest = specDigest(f->spec());
                const DimensionReport rep = near_critical_dimension(*f, *depth);
                manifest.tolerances = {{"depth", *depth}};
                manifest.fittedConstants = {{"epsilonRule", rep.epsilonRule}};
                manifest.wallSeconds = timer.seconds();
                if (!com->outPath.empty()) {
                    CsvTable t;
                    t.header = {"scale", "eps", "count", "runningSlope"};
                    for (std::size_t i = 0; i < rep.scales.size(); ++i) {
                        std::string rs;
                        if (i > 0) {
                            const double dx = std::log2(1.0 / rep.scales[i]) -
                                              std::log2(1.0 / rep.scales[i - 1]);
                            const double dy = std::log2(double(rep.counts[i])) -
                                              std::log2(double(rep.counts[i - 1]));
                            rs = fmt17(dy / dx);
                        }
                        t.rows.push_back({fmt17(rep.scales[i]),
                                          rep.epsilons.empty() ? "" : fmt17(rep.epsilons[i]),
                                          std::to_string(rep.counts[i]), rs});
                    }
                    writeCsvFile(com->outPath, t, manifest);
                }
                json j{{"slope", jnum(rep.slope)},
                       {"residual", jnum(rep.residual)},
                       {"targetD", jnum(rep.targetD)},
                       {"epsilonRule", rep.epsilonRule},
                       {"degenerate", rep.degenerate},
                       {"manifest", manifest.toJson()}};
                std::cout << j.dump(2) << std::endl;
                return kExitOk;
            };
        });
    }

    // ---- verify -------------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("verify", "injectivity / degree / sign / mollify checks");
        cmd->require_subcommand(1);

        auto* inj = cmd->add_subcommand("injectivity", "grid collision scan");
        auto com = std::make_shared<Common>();
        auto res = std::make_shared<int>(128);
        inj->add_option("--map", com->mapPath)->required();
        inj->add_option("--res", *res);
        inj->add_option("--threads", com->threads);
        inj->add_option("--out", com->outPath);
        inj->callback([&, com, res]() {
            run = [&, com, res]() {
                auto f = loadMap(com->mapPath);
                manifest.mapDigest = specDigest(f->spec());
                const int threads = resolveThreads(com->threads);
                manifest.threads = threads;
                const InjectivityReport rep = injectivity_scan(*f, f->domain(), *res, threads);
                json cols = json::array();
                for (const auto& c : rep.collisions)
                    cols.push_back({{"x", vecJson(c.x)},
                                    {"y", vecJson(c.y)},
                                    {"imageDist", jnum(c.imageDist)},
                                    {"pointDist", jnum(c.pointDist)}});
                manifest.tolerances = {{"res", *res}, {"tol", rep.tol}, {"sep", rep.sep}};
                manifest.fittedConstants = {{"sigmaMin", rep.sigmaMin}};
                manifest.wallSeconds = timer.seconds();
                json j{{"sampled", rep.sampled},
                       {"verdict", rep.injectiveOnSample ? "injective-on-sample"
                                                         : "collision-found"},
                       {"collisions", cols},
                       {"manifest", manifest.toJson()}};
                emit(j, com->outPath);
                return kExitOk;
            };
        });

        auto* deg = cmd->add_subcommand("degree", "winding number around a target");
        auto com2 = std::make_shared<Common>();
        auto y = std::make_shared<std::string>();
        auto perSide = std::make_shared<int>(256);
        deg->add_option("--map", com2->mapPath)->required();
        deg->add_option("--y", *y, "target point u,v")->required();
        deg->add_option("--per-side", *perSide);
        deg->add_option("--out", com2->outPath);
        deg->callback([&, com2, y, perSide]() {
            run = [&, com2, y, perSide]() {
                auto f = loadMap(com2->mapPath);
                manifest.mapDigest = specDigest(f->spec());
                const Vec target = parsePoint(*y);
                const auto loop = boundaryLoop(f->domain(), *perSide);
                const int degv = degree_2d(*f, loop, target);
                manifest.tolerances = {{"perSide", *perSide}};
                manifest.wallSeconds = timer.seconds();
                json j{{"target", vecJson(target)},
                       {"degree", degv},
                       {"loopSamples", loop.size()},
                       {"manifest", manifest.toJson()}};
                emit(j, com2->outPath);
                return kExitOk;
            };
        });

        auto* sg = cmd->add_subcommand("signs", "Jacobian sign fractions");
        auto com3 = std::make_shared<Common>();
        auto res3 = std::make_shared<int>(128);
        auto tol3 = std::make_shared<double>(1e-9);
        sg->add_option("--map", com3->mapPath)->required();
        sg->add_option("--res", *res3);
        sg->add_option("--tol", *tol3);
        sg->add_option("--threads", com3->threads);
        sg->add_option("--out", com3->outPath);
        sg->callback([&, com3, res3, tol3]() {
            run = [&, com3, res3, tol3]() {
                auto f = loadMap(com3->mapPath);
                manifest.mapDigest = specDigest(f->spec());
                const int threads = resolveThreads(com3->threads);
                manifest.threads = threads;
                const SignReport rep =
                    sign_constancy_scan(*f, f->domain(), *res3, *tol3, threads);
                json wits = json::array();
                for (const auto& w : rep.zeroWitnesses) wits.push_back(vecJson(w));
                manifest.tolerances = {{"res", *res3}, {"tol", *tol3}};
                manifest.wallSeconds = timer.seconds();
                json j{{"sampled", rep.sampled},
                       {"posFraction", jnum(rep.posFraction)},
                       {"negFraction", jnum(rep.negFraction)},
                       {"zeroFraction", jnum(rep.zeroFraction)},
                       {"zeroWitnesses", wits},
                       {"manifest", manifest.toJson()}};
                emit(j, com3->outPath);
                return kExitOk;
            };
        });

        auto* mol = cmd->add_subcommand("mollify", "convolution smoothing check");
        auto com4 = std::make_shared<Common>();
        auto radius = std::make_shared<double>(0.05);
        auto delta = std::make_shared<double>(0.0);
        auto res4 = std::make_shared<int>(48);
        auto gbox = std::make_shared<std::string>();
        mol->add_option("--map", com4->mapPath)->required();
        mol->add_option("--radius", *radius, "kernel radius")->required();
        mol->add_option("--delta", *delta, "claimed Jacobian floor / 3");
        mol->add_option("--res", *res4);
        mol->add_option("--g", *gbox, "region lox,loy,hix,hiy")->required();
        mol->add_option("--out", com4->outPath);
        mol->callback([&, com4, radius, delta, res4, gbox]() {
            run = [&, com4, radius, delta, res4, gbox]() {
                auto f = loadMap(com4->mapPath);
                manifest.mapDigest = specDigest(f->spec());
                ApproxCheckConfig cfg;
                cfg.kernelRadius = *radius;
                cfg.delta = *delta;
                cfg.res = *res4;
                const Cube G = parseBox(*gbox, 2);
                const MollifyReport rep = mollify_and_check(*f, cfg, G);
                manifest.tolerances = {{"kernelRadius", *radius},
                                       {"delta", *delta},
                                       {"res", *res4}};
                manifest.wallSeconds = timer.seconds();
                json j{{"minJac", jnum(rep.minJac)},
                       {"injective", rep.injective},
                       {"kernelRadius", jnum(rep.kernelRadius)},
                       {"sampled", rep.sampled},
                       {"manifest", manifest.toJson()}};
                emit(j, com4->outPath);
                return kExitOk;
            };
        });

        auto* dis = cmd->add_subcommand("distortion", "|Df|^n / J at a point");
        auto com5 = std::make_shared<Common>();
        auto pt5 = std::make_shared<std::string>();
        dis->add_option("--map", com5->mapPath)->required();
        dis->add_option("--point", *pt5)->required();
        dis->add_option("--out", com5->outPath);
        dis->callback([&, com5, pt5]() {
            run = [&, com5, pt5]() {
                auto f = loadMap(com5->mapPath);
                manifest.mapDigest = specDigest(f->spec());
                const Vec x = parsePoint(*pt5);
                manifest.wallSeconds = timer.seconds();
                json j{{"point", vecJson(x)},
                       {"distortion", jnum(distortion(*f, x))},
                       {"jac", jnum(f->jac(x))},
                       {"manifest", manifest.toJson()}};
                emit(j, com5->outPath);
                return kExitOk;
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitPrecondition;
    }

    try {
        return run ? run() : kExitPrecondition;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition violated: " << e.what() << std::endl;
        return kExitPrecondition;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << std::endl;
        return kExitPrecondition;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << std::endl;
        return kExitPrecondition;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitPrecondition;
    }
}
