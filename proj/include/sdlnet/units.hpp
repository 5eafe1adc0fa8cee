#pragma once

#include <cmath>

namespace sdlnet {

// Times in files are nanoseconds rounded to 1e-6 ns, so that a
// write -> read -> write cycle reproduces the same text.
inline double seconds_to_ns(double s) { return std::round(s * 1e15) / 1e6; }
inline double ns_to_seconds(double ns) { return ns * 1e-9; }

inline double db20(double magnitude) { return 20.0 * std::log10(magnitude); }

}  // namespace sdlnet
