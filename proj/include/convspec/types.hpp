#ifndef CONVSPEC_TYPES_HPP
#define CONVSPEC_TYPES_HPP

#include <string>

#include "convspec/error.hpp"

namespace convspec {

enum class Parity { even, odd };

inline const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

inline Parity parse_parity(const std::string& s) {
  if (s == "even") return Parity::even;
  if (s == "odd") return Parity::odd;
  throw DomainError("parity must be 'even' or 'odd', got '" + s + "'");
}

}  // namespace convspec

#endif  // CONVSPEC_TYPES_HPP
