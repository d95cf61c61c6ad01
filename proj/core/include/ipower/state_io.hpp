#pragma once

// JSON form of a density matrix:
//   {"dims":[dA,dB],"re":[[...],...],"im":[[...],...]}
// with row-major nested arrays. Doubles are written with 17 significant
// digits, so a dump/parse cycle is exact.

#include "ipower/qmat.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace ipower::io {

nlohmann::json state_to_json(const qmat::DensityMatrix& rho);
// Throws Error{ParseError} on schema problems; validation failures of the
// matrix itself surface with their own kinds (NonHermitian, InvalidState...).
qmat::DensityMatrix state_from_json(const nlohmann::json& doc);

std::string dump_state(const qmat::DensityMatrix& rho);
qmat::DensityMatrix parse_state(std::string_view text);

qmat::DensityMatrix read_state_file(const std::filesystem::path& path);
void write_state_file(const qmat::DensityMatrix& rho, const std::filesystem::path& path);

}  // namespace ipower::io
