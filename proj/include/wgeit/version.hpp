#pragma once

#ifndef WGEIT_VERSION
#define WGEIT_VERSION "0.0.0"
#endif

namespace wgeit {

inline constexpr const char* version = WGEIT_VERSION;

} // namespace wgeit
