#pragma once

#include <set>
#include <string>

#include "rtmpi/pi.hpp"

namespace rtmpi::pi::detail {

/// `base` itself if unused, else `base~k` for the least k that is unused.
inline Name fresh_name(const Name& base, const std::set<Name>& avoid) {
  if (!avoid.count(base)) return base;
  for (std::size_t k = 1;; ++k) {
    Name candidate = base + "~" + std::to_string(k);
    if (!avoid.count(candidate)) return candidate;
  }
}

}  // namespace rtmpi::pi::detail
