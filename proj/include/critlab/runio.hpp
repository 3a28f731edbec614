#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <string>
#include <vector>

namespace critlab {

// Provenance block attached to every artifact: the exact invocation, the map
// digest, effective tolerances and any constants fitted during the run, so a
// result can be reproduced or rejected without rerunning blind.
struct RunManifest {
    std::vector<std::string> argv;
    std::string mapDigest;
    nlohmann::json tolerances = nlohmann::json::object();
    nlohmann::json fittedConstants = nlohmann::json::object();
    int threads = 1;
    double wallSeconds = 0.0;
    std::string artifactVersion = "critlab/1.0.0";

    nlohmann::json toJson() const;
    std::vector<std::string> commentLines() const;  // "# key: value" prefix for CSV
};

// Shortest round-trip decimal form of a double (%.17g parses back exactly;
// CSV cells must survive a spreadsheet trip).
std::string fmt17(double v);

// Worker count: the CRITLAB_THREADS environment variable wins over the flag;
// 0 or absent falls back to the flag, floored at 1.
int threadCount(int flagValue);

void writeJsonFile(const std::string& path, const nlohmann::json& j);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// CSV with the manifest as leading # comment lines.
void writeCsvFile(const std::string& path, const CsvTable& t, const RunManifest& m);

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

}  // namespace critlab
