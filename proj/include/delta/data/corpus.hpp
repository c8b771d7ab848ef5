#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace delta::data {

enum class PrototypeSource { wikipedia_corpus, monster_corpus, custom };

const char* to_string(PrototypeSource s);
PrototypeSource parse_prototype_source(std::string_view s);  // throws CorpusError

inline constexpr std::size_t kMinDescription = 200;

struct Prototype {
  std::string name;
  std::string description;
  PrototypeSource source = PrototypeSource::custom;

  bool operator==(const Prototype&) const = default;
};

// One corpus file:
//
//   name: Tyrannosaurus
//   source: wikipedia-corpus
//
//   A paragraph of at least 200 characters ...
//
// Optional `---` lines around the header are ignored. Throws CorpusError.
Prototype parse_prototype(std::string_view text, const std::string& origin = "<text>");

// Every regular file of DIR, sorted by file name. Throws CorpusError when DIR
// is missing.
std::vector<Prototype> load_prototypes(const std::filesystem::path& dir);

// The bundled sample corpus.
std::vector<Prototype> bundled_prototypes();

}  // namespace delta::data
