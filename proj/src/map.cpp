#include "critlab/map.hpp"

#include "critlab/cantor.hpp"
#include "critlab/maps_ball.hpp"
#include "critlab/maps_dense.hpp"
#include "critlab/maps_folding.hpp"
#include "critlab/maps_radial.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>

namespace critlab {

double Map::jac(const Vec& x) const { return det(grad(x)); }

bool Map::d2Tensor(const Vec&, double[kMaxDim][kMaxDim][kMaxDim]) const { return false; }

double Map::singularDistance(const Vec&) const {
    return std::numeric_limits<double>::infinity();
}

void Map::requireInside(const Vec& x, double pad) const {
    if (x.size() != dim()) {
        std::ostringstream os;
        os << family() << ": point has dimension " << x.size() << ", map expects " << dim();
        throw PreconditionError(os.str());
    }
    const Cube dom = domain();
    for (int c = 0; c < dim(); ++c) {
        if (!(x[c] >= dom.lo[c] - pad && x[c] <= dom.hi[c] + pad)) {
            std::ostringstream os;
            os << family() << ": coordinate " << c << " = " << x[c] << " outside ["
               << dom.lo[c] << ", " << dom.hi[c] << "]";
            throw PreconditionError(os.str());
        }
    }
}

namespace {

double needNum(const nlohmann::json& p, const char* key) {
    if (!p.contains(key) || !p[key].is_number()) {
        throw PreconditionError(std::string("map spec: missing numeric param \"") + key + "\"");
    }
    return p[key].get<double>();
}

}  // namespace

std::unique_ptr<Map> makeMap(const nlohmann::json& spec) {
    if (!spec.is_object() || !spec.contains("family") || !spec["family"].is_string())
        throw PreconditionError("map spec: expected an object with a \"family\" string");
    const std::string family = spec["family"].get<std::string>();
    const int n = spec.value("n", 2);
    const nlohmann::json params =
        spec.contains("params") ? spec["params"] : nlohmann::json::object();

    if (family == "radial") {
        RadialProfile prof;
        prof.kind = params.value("profile", std::string("cubic"));
        if (prof.kind == "power") prof.p = needNum(params, "p");
        if (prof.kind == "cubic") prof.c = needNum(params, "c");
        if (prof.kind == "ballbump") {
            prof.amp = needNum(params, "amp");
            prof.R = needNum(params, "R");
        }
        return std::make_unique<RadialMap>(n, prof);
    }
    if (family == "folding") {
        return std::make_unique<FoldingMap>(n, needNum(params, "q"), needNum(params, "a"),
                                            needNum(params, "alpha"));
    }
    if (family == "ball") {
        return std::make_unique<BallMap>(n, needNum(params, "q"), needNum(params, "a"),
                                         needNum(params, "beta"));
    }
    if (family == "dense") {
        std::vector<Vec> centers;
        if (params.contains("centers")) {
            for (const auto& c : params["centers"]) {
                if (!c.is_array() || c.size() != 2)
                    throw PreconditionError("dense spec: each center must be [x, y]");
                centers.push_back(Vec{c[0].get<double>(), c[1].get<double>()});
            }
        } else {
            centers = denseDefaultCenters(static_cast<int>(params.value("k", 5)));
        }
        std::vector<double> radii;
        if (params.contains("radii")) radii = params["radii"].get<std::vector<double>>();
        return std::make_unique<DenseMap>(std::move(centers), std::move(radii),
                                          needNum(params, "q"), needNum(params, "a"));
    }
    if (family == "cantor") {
        RegimeParams p;
        p.n = n;
        p.q = needNum(params, "q");
        p.a = needNum(params, "a");
        p.d = needNum(params, "d");
        const int maxGen = static_cast<int>(params.value("maxGen", 6));
        return std::make_unique<CantorMap>(CantorSchedule::build(p, maxGen));
    }
    throw PreconditionError("map spec: unknown family \"" + family + "\"");
}

std::unique_ptr<Map> loadMap(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot open map spec file: " + path);
    nlohmann::json spec;
    try {
        in >> spec;
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError("cannot parse map spec " + path + ": " + e.what());
    }
    return makeMap(spec);
}

std::string specDigest(const nlohmann::json& spec) {
    const std::string s = spec.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace critlab
