#include "sbd/serialize.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sbd {

using nlohmann::json;

std::string sbd_to_json(const SBDecomposition& sbd) {
    json j;
    j["format"] = "sbdconv.sbd";
    j["version"] = 1;
    j["a"] = sbd.a;
    j["P"] = sbd.P;
    j["constant_offset"] = sbd.constant_offset;
    j["achieved_error"] = sbd.achieved_error;
    j["radial_scale"] = sbd.radial_scale;
    j["coeffs"] = sbd.coeffs;
    j["roots"] = sbd.basis.roots;
    j["norm_constants"] = sbd.basis.norm_constants;
    if (sbd.basis.is_dirichlet()) {
        j["boundary"] = {{"type", "dirichlet"}};
    } else {
        j["boundary"] = {{"type", "robin"}, {"H", sbd.basis.robin_h()}};
    }
    return j.dump(2);
}

SBDecomposition sbd_from_json(const std::string& json_text) {
    const json j = json::parse(json_text);
    if (j.value("format", "") != "sbdconv.sbd")
        throw std::runtime_error("sbd_from_json: unrecognized format");
    if (j.value("version", 0) != 1) throw std::runtime_error("sbd_from_json: unsupported version");
    SBDecomposition s;
    s.a = j.at("a").get<double>();
    s.P = j.at("P").get<int>();
    s.constant_offset = j.at("constant_offset").get<double>();
    s.achieved_error = j.at("achieved_error").get<double>();
    s.radial_scale = j.value("radial_scale", 1.0);
    s.coeffs = j.at("coeffs").get<std::vector<double>>();
    s.basis.roots = j.at("roots").get<std::vector<double>>();
    s.basis.norm_constants = j.at("norm_constants").get<std::vector<double>>();
    const auto& b = j.at("boundary");
    if (b.at("type") == "robin")
        s.basis.boundary = Robin{b.at("H").get<double>()};
    else
        s.basis.boundary = Dirichlet{};
    return s;
}

std::string quadrature_to_json(const FrequencyQuadrature& q) {
    json j;
    j["format"] = "sbdconv.quadrature";
    j["version"] = 1;
    j["total_error_budget"] = q.total_error_budget;
    j["ring_offsets"] = q.ring_offsets;
    json freqs = json::array();
    json weights = json::array();
    for (int i = 0; i < q.size(); ++i) {
        freqs.push_back({q.freqs[i].x, q.freqs[i].y});
        weights.push_back({q.weights[i].real(), q.weights[i].imag()});
    }
    j["freqs"] = std::move(freqs);
    j["weights"] = std::move(weights);
    return j.dump();
}

FrequencyQuadrature quadrature_from_json(const std::string& json_text) {
    const json j = json::parse(json_text);
    if (j.value("format", "") != "sbdconv.quadrature")
        throw std::runtime_error("quadrature_from_json: unrecognized format");
    if (j.value("version", 0) != 1)
        throw std::runtime_error("quadrature_from_json: unsupported version");
    FrequencyQuadrature q;
    q.total_error_budget = j.at("total_error_budget").get<double>();
    q.ring_offsets = j.at("ring_offsets").get<std::vector<int>>();
    for (const auto& f : j.at("freqs")) q.freqs.push_back({f[0].get<double>(), f[1].get<double>()});
    for (const auto& w : j.at("weights")) q.weights.emplace_back(w[0].get<double>(), w[1].get<double>());
    return q;
}

void save_text(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_text: cannot open " + path);
    os << text;
    if (!os) throw std::runtime_error("save_text: write failed for " + path);
}

std::string load_text(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_text: cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace sbd
