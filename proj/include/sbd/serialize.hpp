#pragma once

#include <string>

#include "sbd/ring_quadrature.hpp"
#include "sbd/sbd.hpp"

namespace sbd {

// Versioned JSON records for the off-line outputs.
std::string sbd_to_json(const SBDecomposition& sbd);
SBDecomposition sbd_from_json(const std::string& json_text);

std::string quadrature_to_json(const FrequencyQuadrature& q);
FrequencyQuadrature quadrature_from_json(const std::string& json_text);

void save_text(const std::string& path, const std::string& text);
std::string load_text(const std::string& path);

} // namespace sbd
