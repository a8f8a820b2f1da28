#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "sbd/conv_operator.hpp"

namespace sbdcli {

// "key = value" lines; '#' starts a comment. Values override CLI flags.
std::map<std::string, std::string> read_config(const std::string& path);

// Kernel flag syntax: "laplace" or "helmholtz:<k>".
sbd::KernelSpec parse_kernel(const std::string& name);

std::vector<sbd::Vec2> uniform_square_cloud(int n, std::mt19937_64& rng);

// Minimal deterministic CSV emitter with a fixed header row.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);
    static std::string num(double v);
    static std::string num(std::uint64_t v);
    static std::string num(int v);

  private:
    std::ofstream os_;
    std::size_t width_;
};

double now_seconds();

void ensure_directory(const std::string& path);

} // namespace sbdcli
