#pragma once

#include <string>

namespace meso {

/// Shortest decimal string that round-trips to the same double. Switches to
/// scientific notation when the decimal exponent is >= 6 or <= -6.
std::string format_double(double value);

}  // namespace meso
