#pragma once

#include "steer/moments.hpp"
#include "steer/scenarios.hpp"
#include "steer/sdp.hpp"

#include "json.hpp"

#include <string>

namespace steer {

using Json = nlohmann::ordered_json;

/// {dim_b, inputs: [{outcomes: [real], sigmas: [matrix of [re, im] pairs]}]}
Json assemblage_to_json(const Assemblage& assemblage);
Assemblage assemblage_from_json(const Json& doc);

Assemblage load_assemblage(const std::string& path);
void save_assemblage(const Assemblage& assemblage, const std::string& path);

/// Word list, unknown table and per-entry expansions, for regression snapshots.
Json template_to_json(const MomentTemplate& tmpl);

Json certificate_to_json(const CertificateReport& cert);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace steer
