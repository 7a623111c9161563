#pragma once

// Artifact output: CSV with fixed scientific formatting, JSON metadata,
// raw field dumps. Emission is deterministic so re-runs are byte-identical.

#include <string>
#include <vector>

#include <json.hpp>

#include "sfe/spectral_core.hpp"

namespace sfe {

using Json = nlohmann::json;

// Scientific notation, 17 significant digits ("%.16e").
std::string format_sci(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);

// Layout: int32 d, int32 N, then N^d float64 values (native endianness,
// row-major, axis 0 slowest).
void write_field_binary(const std::string& path, const Grid& g,
                        const RealField& u);

}  // namespace sfe
