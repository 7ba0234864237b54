#include "sfm/pedestrian.hpp"

#include <stdexcept>
#include <string>

namespace sfm {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Original: return "original";
    case Variant::Hmfv: return "hmfv";
    case Variant::Lkf: return "lkf";
    case Variant::Familiarity: return "familiarity";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "original") return Variant::Original;
  if (name == "hmfv") return Variant::Hmfv;
  if (name == "lkf") return Variant::Lkf;
  if (name == "familiarity") return Variant::Familiarity;
  throw std::invalid_argument("unknown variant '" + std::string(name) +
                              "' (expected original, hmfv, lkf or familiarity)");
}

}  // namespace sfm
