#pragma once

namespace hbarsim {

inline constexpr const char* version = "0.1.0";

}  // namespace hbarsim
