#pragma once

#define CATASTRANK_VERSION "0.1.0"

namespace catastrank {

inline const char* version() { return CATASTRANK_VERSION; }

}  // namespace catastrank
