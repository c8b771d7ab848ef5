#include "delta/assets.hpp"

#include "delta/error.hpp"

namespace delta::assets {

std::optional<std::string_view> find(std::string_view path) {
  for (std::size_t i = 0; i < detail::kCount; ++i) {
    if (path == detail::kTable[i].path) return detail::kTable[i].data;
  }
  return std::nullopt;
}

std::string_view get(std::string_view path) {
  if (auto a = find(path)) return *a;
  throw Error("missing bundled asset: " + std::string(path));
}

std::vector<std::string> list(std::string_view prefix) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < detail::kCount; ++i) {
    std::string_view p = detail::kTable[i].path;
    if (p.substr(0, prefix.size()) == prefix) out.emplace_back(p);
  }
  return out;
}

}  // namespace delta::assets
