#pragma once

#include <filesystem>

namespace ptv::spectral {

// Asset directory resolution: explicit argument beats the PTV_ASSET_DIR
// environment variable, which beats ./assets.
std::filesystem::path resolve_asset_dir(const std::filesystem::path& explicit_dir = {});

}  // namespace ptv::spectral
