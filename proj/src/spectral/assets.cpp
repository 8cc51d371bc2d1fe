#include "ptv/spectral/assets.hpp"

#include <cstdlib>

namespace ptv::spectral {

std::filesystem::path resolve_asset_dir(const std::filesystem::path& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("PTV_ASSET_DIR"); env && *env) return env;
  return "assets";
}

}  // namespace ptv::spectral
