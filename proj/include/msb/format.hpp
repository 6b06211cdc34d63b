#pragma once

#include <string>

namespace msb {

// Shortest decimal string that round-trips to the same double. Used for all
// CSV and JSON number output so repeated runs are byte-identical.
std::string format_double(double v);

}  // namespace msb
