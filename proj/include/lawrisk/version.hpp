#pragma once

namespace lawrisk {
inline constexpr const char* version = "1.0.0";
}
