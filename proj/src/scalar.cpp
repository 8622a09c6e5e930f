#include "carrots/scalar.hpp"

#include <stdexcept>
#include <string>

namespace carrots {

std::string_view to_string(Precision p) { return p == Precision::extended ? "extended" : "standard"; }

Precision parse_precision(std::string_view s) {
  if (s == "standard" || s == "double") return Precision::standard;
  if (s == "extended" || s == "double-double") return Precision::extended;
  throw std::invalid_argument("unknown precision '" + std::string(s) + "'");
}

}  // namespace carrots
