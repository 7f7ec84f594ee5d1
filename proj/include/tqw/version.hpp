#pragma once

#ifndef TQW_VERSION
#define TQW_VERSION "0.1.0"
#endif

namespace tqw {

inline constexpr const char* version = TQW_VERSION;

}  // namespace tqw
