#include "cli_common.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace sbdcli {

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = val;
    }
    return kv;
}

sbd::KernelSpec parse_kernel(const std::string& name) {
    if (name == "laplace") return sbd::kernel_laplace();
    const std::string prefix = "helmholtz:";
    if (name.rfind(prefix, 0) == 0) {
        const double k = std::stod(name.substr(prefix.size()));
        return sbd::kernel_helmholtz(k);
    }
    throw std::runtime_error("unknown kernel '" + name + "' (use laplace or helmholtz:<k>)");
}

std::vector<sbd::Vec2> uniform_square_cloud(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<sbd::Vec2> pts(n);
    for (auto& p : pts) p = {u(rng), u(rng)};
    return pts;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : os_(path), width_(header.size()) {
    if (!os_) throw std::runtime_error("csv: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i) os_ << header[i] << (i + 1 < width_ ? "," : "\n");
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("csv: column count mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << cells[i] << (i + 1 < width_ ? "," : "\n");
}

std::string CsvWriter::num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string CsvWriter::num(std::uint64_t v) { return std::to_string(v); }
std::string CsvWriter::num(int v) { return std::to_string(v); }

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void ensure_directory(const std::string& path) {
    std::filesystem::create_directories(path);
}

} // namespace sbdcli
