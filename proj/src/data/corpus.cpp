#include "delta/data/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "delta/assets.hpp"
#include "delta/error.hpp"

namespace delta::data {

namespace fs = std::filesystem;

const char* to_string(PrototypeSource s) {
  switch (s) {
    case PrototypeSource::wikipedia_corpus: return "wikipedia-corpus";
    case PrototypeSource::monster_corpus: return "monster-corpus";
    case PrototypeSource::custom: return "custom";
  }
  return "?";
}

PrototypeSource parse_prototype_source(std::string_view s) {
  if (s == "wikipedia-corpus") return PrototypeSource::wikipedia_corpus;
  if (s == "monster-corpus") return PrototypeSource::monster_corpus;
  if (s == "custom") return PrototypeSource::custom;
  throw CorpusError("unknown prototype source '" + std::string(s) + "'");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Prototype parse_prototype(std::string_view text, const std::string& origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  Prototype p;
  bool have_name = false, have_source = false, in_header = true;
  std::string body;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (in_header) {
      if (t == "---") continue;
      if (t.empty()) {
        if (have_name || have_source) in_header = false;
        continue;
      }
      const auto colon = t.find(':');
      if (colon == std::string::npos) throw CorpusError(origin + ": expected 'key: value' header, got '" + t + "'");
      const std::string key = trim(t.substr(0, colon)), value = trim(t.substr(colon + 1));
      if (key == "name") {
        p.name = value;
        have_name = true;
      } else if (key == "source") {
        p.source = parse_prototype_source(value);
        have_source = true;
      } else {
        throw CorpusError(origin + ": unknown header key '" + key + "'");
      }
      continue;
    }
    if (!body.empty()) body += ' ';
    body += t;
  }
  if (!have_name || p.name.empty()) throw CorpusError(origin + ": missing name");
  if (!have_source) throw CorpusError(origin + ": missing source");
  p.description = trim(body);
  if (p.description.size() < kMinDescription) {
    throw CorpusError(origin + ": description has " + std::to_string(p.description.size()) + " characters, need " +
                      std::to_string(kMinDescription));
  }
  return p;
}

std::vector<Prototype> load_prototypes(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw CorpusError("corpus directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Prototype> out;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out.push_back(parse_prototype(ss.str(), f.filename().string()));
  }
  return out;
}

std::vector<Prototype> bundled_prototypes() {
  std::vector<Prototype> out;
  for (const auto& path : assets::list("prototypes/")) out.push_back(parse_prototype(assets::get(path), path));
  return out;
}

}  // namespace delta::data
