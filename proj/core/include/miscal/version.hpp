#pragma once

namespace miscal {

inline constexpr const char kMiscalVersion[] = "0.1.0";

}  // namespace miscal
