#include "meso/core/format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string_view>

namespace meso {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return std::signbit(value) ? "-0" : "0";

  std::array<char, 64> buf{};
  auto sci = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                           std::chars_format::scientific);
  std::string_view s(buf.data(), static_cast<std::size_t>(sci.ptr - buf.data()));
  const auto epos = s.find('e');
  const int exponent = std::atoi(std::string(s.substr(epos + 1)).c_str());
  if (exponent >= 6 || exponent <= -6) return std::string(s);

  auto fixed = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                             std::chars_format::fixed);
  return std::string(buf.data(), fixed.ptr);
}

}  // namespace meso
