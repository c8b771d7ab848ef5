#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Read-only data fixtures compiled into the library (type chart, move
// database, seed roles, sample prototypes).
namespace delta::assets {

std::optional<std::string_view> find(std::string_view path);

// Throws delta::Error when the asset is missing.
std::string_view get(std::string_view path);

// Paths starting with `prefix`, sorted.
std::vector<std::string> list(std::string_view prefix);

namespace detail {
struct Entry {
  const char* path;
  std::string_view data;
};
extern const Entry kTable[];
extern const std::size_t kCount;
}  // namespace detail

}  // namespace delta::assets
