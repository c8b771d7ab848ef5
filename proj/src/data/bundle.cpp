#include "delta/data/bundle.hpp"

#include <sstream>

#include "delta/assets.hpp"
#include "delta/dsl/parser.hpp"
#include "delta/dsl/printer.hpp"
#include "delta/error.hpp"

namespace delta::data {

using nlohmann::json;

core::RoleScript base_script(const core::RoleScript& script) {
  core::RoleScript b = script;
  if (b.moves.size() > 2) b.moves.resize(2);
  b.abilities.clear();
  return b;
}

std::vector<std::string> coding_instructions(const core::RoleScript& script) {
  std::vector<std::string> out;
  for (std::size_t i = 2; i < script.moves.size(); ++i) {
    out.push_back("Learn the move " + script.moves[i].name + ": " + script.moves[i].description);
  }
  for (const auto& a : script.abilities) out.push_back("Gain the ability " + a.name + ": " + a.description);
  return out;
}

namespace {

constexpr std::string_view kMarker = "#>";

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1));
}

}  // namespace

Listing Listing::parse(std::string_view text) {
  Listing out;
  std::string head;
  Step* cur = nullptr;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (std::string_view(line).substr(0, kMarker.size()) == kMarker) {
      out.steps.push_back({trim(std::string_view(line).substr(kMarker.size())), {}});
      cur = &out.steps.back();
      continue;
    }
    (cur ? cur->delta_source : head) += line + "\n";
  }
  if (!blank(head)) out.role_source = head;
  for (const auto& s : out.steps) {
    if (s.instruction.empty()) throw Error("listing: empty instruction after '#>'");
    if (blank(s.delta_source)) throw Error("listing: no increment after '#> " + s.instruction + "'");
  }
  return out;
}

std::string Listing::render() const {
  std::string out = role_source ? *role_source : "";
  for (const auto& s : steps) {
    out += std::string(kMarker) + " " + s.instruction + "\n" + s.delta_source;
    if (!s.delta_source.empty() && s.delta_source.back() != '\n') out += '\n';
  }
  return out;
}

Listing listing_of(const core::EngineState& state) {
  Listing l;
  for (const auto& h : state.history()) l.steps.push_back({h.instruction.text, dsl::print(h.delta)});
  return l;
}

core::EngineState fold_listing(const core::RoleScript& script, const Listing& listing, core::Author author) {
  core::EngineState state = listing.role_source ? core::EngineState(dsl::parse_role(*listing.role_source))
                                                : core::init_engine(base_script(script));
  for (const auto& s : listing.steps) {
    state = core::merge(dsl::parse_delta(s.delta_source), state, {s.instruction, author});
  }
  return state;
}

json RoleBundle::to_json() const {
  json history = json::array();
  for (const auto& h : state.history()) {
    history.push_back({{"instruction", h.instruction.text},
                       {"author", core::to_string(h.instruction.author)},
                       {"delta", dsl::print(h.delta)},
                       {"selected", h.selected}});
  }
  return {{"id", id},
          {"script", script.to_json()},
          {"initial", dsl::print(state.initial_role())},
          {"history", history},
          {"code", dsl::print(state.role())}};
}

RoleBundle RoleBundle::from_json(const json& j) {
  try {
    const auto initial = dsl::parse_role(j.at("initial").get<std::string>());
    std::vector<core::HistoryEntry> history;
    for (const auto& h : j.at("history")) {
      history.push_back({{h.at("instruction").get<std::string>(), core::parse_author(h.at("author").get<std::string>())},
                         dsl::parse_delta(h.at("delta").get<std::string>()),
                         h.value("selected", std::vector<std::string>{})});
    }
    RoleBundle b{j.at("id").get<std::string>(), core::RoleScript::from_json(j.at("script")),
                 core::rebuild(initial, history)};
    if (j.contains("code") && dsl::print(b.state.role()) != j.at("code").get<std::string>()) {
      throw Error("role bundle '" + b.id + "': rebuilt code differs from the stored code");
    }
    return b;
  } catch (const json::exception& e) {
    throw Error(std::string("role bundle: ") + e.what());
  }
}

RoleBundle load_seed(const std::string& id, std::string_view script_json, std::string_view listing) {
  core::RoleScript script;
  try {
    script = core::RoleScript::from_json(json::parse(script_json));
  } catch (const json::exception& e) {
    throw Error("seed " + id + ": " + e.what());
  }
  const Listing l = Listing::parse(listing);
  if (l.steps.size() != coding_instructions(script).size()) {
    throw Error("seed " + id + ": " + std::to_string(l.steps.size()) + " increments for " +
                std::to_string(coding_instructions(script).size()) + " scripted moves and abilities");
  }
  return {id, script, fold_listing(script, l, core::Author::pipeline)};
}

const std::vector<RoleBundle>& seed_roles() {
  static const std::vector<RoleBundle> seeds = [] {
    std::vector<RoleBundle> out;
    for (const auto& path : assets::list("seeds/")) {
      if (path.size() < 5 || path.substr(path.size() - 5) != ".json") continue;
      const std::string stem = path.substr(0, path.size() - 5);
      const std::string id = stem.substr(std::string("seeds/").size());
      out.push_back(load_seed(id, assets::get(path), assets::get(stem + ".dsl")));
    }
    return out;
  }();
  return seeds;
}

}  // namespace delta::data
