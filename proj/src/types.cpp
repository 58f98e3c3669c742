#include "proxkit/types.hpp"

#include "proxkit/util.hpp"

namespace proxkit {

std::string_view to_string(Sector s) {
  switch (s) {
    case Sector::Academic: return "academic";
    case Sector::Industry: return "industry";
    case Sector::Excluded: return "excluded";
  }
  return "?";
}

std::string_view to_string(PaperType t) {
  switch (t) {
    case PaperType::Academic: return "academic";
    case PaperType::Industry: return "industry";
    case PaperType::Cooperation: return "cooperation";
    case PaperType::Excluded: return "excluded";
  }
  return "?";
}

std::string_view to_string(EntityClass c) {
  switch (c) {
    case EntityClass::Method: return "method";
    case EntityClass::Tool: return "tool";
    case EntityClass::Metric: return "metric";
    case EntityClass::Dataset: return "dataset";
  }
  return "?";
}

std::optional<PaperType> paper_type_from_string(std::string_view s) {
  const std::string v = to_lower(trim(s));
  if (v == "academic") return PaperType::Academic;
  if (v == "industry") return PaperType::Industry;
  if (v == "cooperation") return PaperType::Cooperation;
  if (v == "excluded") return PaperType::Excluded;
  return std::nullopt;
}

std::optional<EntityClass> entity_class_from_string(std::string_view s) {
  const std::string v = to_lower(trim(s));
  if (v == "method") return EntityClass::Method;
  if (v == "tool") return EntityClass::Tool;
  if (v == "metric") return EntityClass::Metric;
  if (v == "dataset") return EntityClass::Dataset;
  return std::nullopt;
}

}  // namespace proxkit
