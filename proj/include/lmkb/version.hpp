#pragma once

namespace lmkb {

inline constexpr const char* kArtifactVersion = "lmkb 0.1.0";

}  // namespace lmkb
