#include "critlab/runio.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace critlab {

nlohmann::json RunManifest::toJson() const {
    return {{"argv", argv},
            {"mapDigest", mapDigest},
            {"tolerances", tolerances},
            {"fittedConstants", fittedConstants},
            {"threads", threads},
            {"wallSeconds", wallSeconds},
            {"artifactVersion", artifactVersion}};
}

std::vector<std::string> RunManifest::commentLines() const {
    std::vector<std::string> lines;
    std::string cmd;
    for (const auto& a : argv) {
        if (!cmd.empty()) cmd += ' ';
        cmd += a;
    }
    lines.push_back("# argv: " + cmd);
    if (!mapDigest.empty()) lines.push_back("# mapDigest: " + mapDigest);
    lines.push_back("# tolerances: " + tolerances.dump());
    if (!fittedConstants.empty()) lines.push_back("# fittedConstants: " + fittedConstants.dump());
    lines.push_back("# threads: " + std::to_string(threads));
    lines.push_back("# wallSeconds: " + fmt17(wallSeconds));
    lines.push_back("# artifactVersion: " + artifactVersion);
    return lines;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int threadCount(int flagValue) {
    if (const char* env = std::getenv("CRITLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return flagValue >= 1 ? flagValue : 1;
}

void writeJsonFile(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

void writeCsvFile(const std::string& path, const CsvTable& t, const RunManifest& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& line : m.commentLines()) out << line << '\n';
    for (std::size_t c = 0; c < t.header.size(); ++c)
        out << t.header[c] << (c + 1 < t.header.size() ? "," : "\n");
    for (const auto& row : t.rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            out << row[c] << (c + 1 < row.size() ? "," : "\n");
}

}  // namespace critlab
