#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace proxkit {

/// Sector a single institution (and hence an author) belongs to.
enum class Sector : uint8_t { Academic = 0, Industry = 1, Excluded = 2 };

/// Classification of a whole paper from its authors' sectors.
enum class PaperType : uint8_t { Academic = 0, Industry = 1, Cooperation = 2, Excluded = 3 };

/// Knowledge entity classes. The four classes never overlap.
enum class EntityClass : uint8_t { Method = 0, Tool = 1, Metric = 2, Dataset = 3 };

inline constexpr std::array<EntityClass, 4> kEntityClasses = {
    EntityClass::Method, EntityClass::Tool, EntityClass::Metric, EntityClass::Dataset};

/// One (year, sector) cell of the corpus; side is never Excluded.
struct Stratum {
  int year = 0;
  Sector side = Sector::Academic;
};

std::string_view to_string(Sector s);
std::string_view to_string(PaperType t);
std::string_view to_string(EntityClass c);
std::optional<PaperType> paper_type_from_string(std::string_view s);
std::optional<EntityClass> entity_class_from_string(std::string_view s);

/// Config-level failure; the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field_path, const std::string& what)
      : std::runtime_error(field_path + ": " + what), field_path_(std::move(field_path)) {}
  const std::string& field_path() const { return field_path_; }

 private:
  std::string field_path_;
};

/// Malformed input data; the CLI maps this to exit code 3.
class DataError : public std::runtime_error {
 public:
  DataError(std::string file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        file_(std::move(file)),
        line_(line) {}
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Violated precondition on otherwise well-formed data.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace proxkit
