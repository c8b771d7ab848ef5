#include "delta/data/codesign.hpp"

#include <algorithm>
#include <cctype>

#include "delta/dsl/diagnostic.hpp"
#include "delta/error.hpp"
#include "delta/eval/opponents.hpp"
#include "delta/proxy/prompts.hpp"

namespace delta::data {

using nlohmann::json;

namespace {

constexpr std::string_view kSystem =
    "You design creatures for a turn-based battle game and write their code in a small sandboxed role language.";

constexpr std::string_view kSchema = R"(script schema (JSON):
  {"species": "Name-Like-This", "types": ["Type1", "optional Type2"],
   "stats": {"hp": 40-120, "atk": .., "def": .., "spa": .., "spd": .., "spe": ..},
   "moves": [{"name": "..", "description": "..", "basePower": 0-250, "category": "physical|special", "type": ".."}],
   "abilities": [{"name": "..", "description": ".."}]}
  two to four moves; the first two are plain attacks)";

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool mentions(const std::string& text, const std::vector<std::string_view>& words) {
  return std::any_of(words.begin(), words.end(), [&](std::string_view w) { return text.find(w) != std::string::npos; });
}

// First fenced block (any language tag), else the outermost braces.
std::string extract_json(std::string_view text) {
  const auto open = text.find("```");
  if (open != std::string_view::npos) {
    const auto body = text.find('\n', open);
    const auto close = body == std::string_view::npos ? body : text.find("```", body);
    if (close != std::string_view::npos) return std::string(text.substr(body + 1, close - body - 1));
  }
  const auto b = text.find('{'), e = text.rfind('}');
  if (b == std::string_view::npos || e == std::string_view::npos || e < b) return {};
  return std::string(text.substr(b, e - b + 1));
}

// Content of the last ```json block after `label`.
std::string block_after(std::string_view text, std::string_view label) {
  const auto at = text.rfind(label);
  if (at == std::string_view::npos) return {};
  return extract_json(text.substr(at));
}

std::string line_after(std::string_view text, std::string_view label) {
  const auto at = text.find(label);
  if (at == std::string_view::npos) return {};
  const auto start = at + label.size();
  const auto end = text.find('\n', start);
  return std::string(text.substr(start, end == std::string_view::npos ? end : end - start));
}

std::string example_block(const RoleBundle& b) {
  std::string out = "Script:\n```json\n" + b.script.to_json().dump(2) + "\n```\n";
  return out;
}

std::string code_block(const RoleBundle& b) {
  return "Code (increments over the rule-based initial role):\n```\n" + listing_of(b.state).render() + "```\n";
}

std::uint64_t fnv(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

proxy::PromptBundle design_prompt(const Prototype& proto, const RoleBundle& example) {
  proxy::PromptBundle p;
  p.system = std::string(kSystem);
  p.user = "Design a new creature inspired by this prototype.\n\nPrototype: " + proto.name +
           "\nDescription: " + proto.description + "\n\nHere is one existing creature for reference.\n" +
           example_block(example) + "\n" + std::string(kSchema) +
           "\n\nLet the prototype's distinctive traits shape the moves and abilities. Answer with one fenced json "
           "block holding the script.\n";
  p.max_tokens = 1024;
  p.temperature = 0.7;
  p.template_version = std::string(kDesignTemplate);
  return p;
}

proxy::PromptBundle code_prompt(const core::RoleScript& script, const std::vector<RoleBundle>& examples) {
  proxy::PromptBundle p;
  p.system = std::string(kSystem);
  p.user = "Each creature starts from rule-based code: one plain attack per move slot for its first two moves. "
           "Every further move and every ability is added as one increment, in script order.\n\n";
  for (std::size_t i = 0; i < examples.size(); ++i) {
    p.user += "Example " + std::to_string(i + 1) + "\n" + example_block(examples[i]) + code_block(examples[i]) + "\n";
  }
  p.user += std::string(proxy::grammar_cheat_sheet());
  p.user += "\n\nWrite the increments for this creature, each preceded by a '#> ' line naming the move or ability.\n";
  p.user += "Target script:\n```json\n" + script.to_json().dump(2) + "\n```\n";
  p.user += "Answer with one fenced code block.\n";
  p.max_tokens = 2048;
  p.temperature = 0.2;
  p.template_version = std::string(kCodeTemplate);
  return p;
}

core::RoleScript design_role(const Prototype& proto, const SamplePool& pool, proxy::TextGenerator& generator,
                             battle::Rng& rng, core::Provenance provenance) {
  const auto examples = pool.sample(kDesignExamples, rng);
  proxy::PromptBundle prompt = design_prompt(proto, examples.front());
  std::string problem;
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (attempt == 1) {
      prompt.user += "\nYour previous answer was not a valid script (" + problem +
                     "). Answer again with one fenced json block.\n";
    }
    const std::string answer = generator.complete(prompt);
    try {
      auto script = core::RoleScript::from_json(json::parse(extract_json(answer)));
      script.provenance = provenance;
      core::check_script(script);
      return script;
    } catch (const json::exception& e) {
      problem = e.what();
    } catch (const Error& e) {
      problem = e.what();
    }
  }
  throw GenerationError("design for '" + proto.name + "' failed twice: " + problem);
}

core::EngineState code_role(const core::RoleScript& script, const SamplePool& pool, proxy::TextGenerator& generator,
                            battle::Rng& rng) {
  const auto examples = pool.sample(kCodeExamples, rng);
  const std::string answer = generator.complete(code_prompt(script, examples));
  Listing listing;
  try {
    listing = Listing::parse(proxy::extract_delta(answer));
  } catch (const Error& e) {
    throw GenerationError(std::string("code answer is not a listing: ") + e.what());
  }
  const auto wanted = coding_instructions(script);
  if (listing.steps.size() != wanted.size()) {
    throw GenerationError("code answer has " + std::to_string(listing.steps.size()) + " increments, script needs " +
                          std::to_string(wanted.size()));
  }
  for (std::size_t i = 0; i < wanted.size(); ++i) listing.steps[i].instruction = wanted[i];
  core::EngineState state = [&] {
    try {
      return fold_listing(script, listing, core::Author::pipeline);
    } catch (const SyntaxError& e) {
      throw GenerationError(std::string("code answer does not parse: ") + e.what());
    }
  }();
  if (state.move_slots().size() != script.moves.size()) {
    throw GenerationError("code has " + std::to_string(state.move_slots().size()) + " move slots, script lists " +
                          std::to_string(script.moves.size()));
  }
  return state;
}

core::RoleScript TemplateGenerator::script_for(const std::string& name, const std::string& description) {
  const std::string text = lower(name + " " + description);
  core::RoleScript s;
  s.species = name;
  std::replace(s.species.begin(), s.species.end(), ' ', '-');

  static const std::vector<std::pair<std::vector<std::string_view>, const char*>> kTypes = {
      {{"fire", "flame", "burn"}, "Fire"},          {{"water", "river", "sea", "reef", "marine"}, "Water"},
      {{"electric", "shock"}, "Electric"},          {{"forest", "leaf", "plant", "hedge"}, "Grass"},
      {{"flying", "wing", "sky", "air"}, "Flying"}, {{"poison", "venom"}, "Poison"},
      {{"bone", "rock", "stone"}, "Rock"},          {{"spine", "armor", "steel"}, "Steel"},
      {{"night", "shadow", "dark"}, "Dark"},        {{"ice", "snow", "cold"}, "Ice"},
      {{"dragon", "wyvern", "cretaceous"}, "Dragon"}};
  for (const auto& [words, type] : kTypes) {
    if (s.types.size() < 2 && mentions(text, words)) s.types.emplace_back(type);
  }
  if (s.types.empty()) s.types.emplace_back("Normal");

  std::uint64_t h = fnv(name);
  auto stat = [&] {
    const int v = 40 + static_cast<int>(h % 81);
    h = h * 6364136223846793005ull + 1442695040888963407ull;
    return v;
  };
  s.stats = {stat(), stat(), stat(), stat(), stat(), stat()};

  using core::MoveCategory;
  s.moves.push_back({"Tackle", "A full-body charge.", 40, MoveCategory::physical, "Normal"});
  s.moves.push_back({s.types[0] + " Strike", "A plain " + lower(s.types[0]) + " attack.", 50, MoveCategory::physical,
                     s.types[0]});
  struct Extra {
    std::vector<std::string_view> words;
    core::MoveSpec move;
  };
  static const std::vector<Extra> kExtras = {
      {{"bite", "jaw", "teeth"},
       {"Crushing Bite", "Bites with enormous force and may lower the foe's defense.", 80, MoveCategory::physical,
        "Dark"}},
      {{"spine", "shell", "armor", "ball"},
       {"Spine Guard", "Curls up behind its defenses, blocking the next attack and raising defense.", {}, {}, {}}},
      {{"fire", "flame", "burn"},
       {"Fireball", "Hurls a ball of fire that may burn.", 75, MoveCategory::special, "Fire"}},
      {{"shock", "electric", "stun"},
       {"Shock Burst", "A strong electric burst that may paralyze.", 80, MoveCategory::special, "Electric"}},
      {{"poison", "venom"},
       {"Venom Talon", "Scratches with poisoned talons that may poison.", 60, MoveCategory::physical, "Poison"}},
      {{"fast", "speed", "snap", "quick", "sudden"},
       {"Quick Strike", "Strikes, then acts first next turn.", 40, MoveCategory::physical, "Normal"}},
      {{"sleep", "recover", "slow"}, {"Rest", "Recovers health when hurt.", {}, {}, {}}},
  };
  for (const auto& e : kExtras) {
    if (s.moves.size() < 4 && mentions(text, e.words)) s.moves.push_back(e.move);
  }
  if (s.moves.size() == 2) {
    s.moves.push_back({"Wild Charge", "A reckless charge that hurts the user too.", 90, MoveCategory::physical,
                       "Normal"});
  }
  if (mentions(text, {"enrage", "angry", "aggressive"})) {
    s.abilities.push_back({"Rage", "Hits harder when badly hurt."});
  } else if (mentions(text, {"force", "crush", "jaw"})) {
    s.abilities.push_back({"Strong Jaw", "Strong moves hit with crushing force."});
  } else {
    s.abilities.push_back({"Stubborn", "Its stats cannot be lowered."});
  }
  return s;
}

std::string TemplateGenerator::listing_for(const core::RoleScript& script) {
  const std::string role = core::role_name_for(script.species);
  const auto instructions = coding_instructions(script);
  Listing out;
  std::size_t k = 0;
  for (std::size_t i = 2; i < script.moves.size(); ++i, ++k) {
    const auto& m = script.moves[i];
    const std::string text = lower(m.name + " " + m.description);
    const std::string slot = "move_" + std::to_string(i + 1);
    const std::string hit = "    deal_damage(\"" + m.name + "\", " + std::to_string(m.base_power.value_or(40)) +
                            ", \"" + m.type.value_or(script.types[0]) + "\", \"" +
                            core::to_string(m.category.value_or(core::MoveCategory::physical)) + "\")\n";
    auto on_chance = [](int pct, const std::string& stmt) {
      return "    if chance(" + std::to_string(pct) + ") {\n      " + stmt + "\n    }\n";
    };
    std::string body;
    if (mentions(text, {"lower the foe"})) {
      body = hit + on_chance(30, "boost_foe(\"def\", -1)");
    } else if (mentions(text, {"blocking", "guard", "shield"})) {
      body = "    self.flags.protected = 1\n    boost_self(\"def\", 1)\n";
    } else if (mentions(text, {"burn"})) {
      body = hit + on_chance(30, "inflict_status(\"burn\", 3)");
    } else if (mentions(text, {"paralyze"})) {
      body = hit + on_chance(30, "inflict_status(\"paralysis\", 3)");
    } else if (mentions(text, {"poison"})) {
      body = hit + on_chance(30, "inflict_status(\"poison\", 4)");
    } else if (mentions(text, {"first"})) {
      body = hit + "    self.flags.priority = 1\n";
    } else if (mentions(text, {"recover", "heal"})) {
      body = "    if self.hp < self.max_hp {\n      heal(self.max_hp / 3)\n    }\n";
    } else if (mentions(text, {"reckless", "hurts the user"})) {
      body = "    let dealt = " + hit.substr(4) + "    recoil(max(1, dealt / 4))\n";
    } else {
      body = hit;
    }
    out.steps.push_back({instructions[k], "increment " + role + " {\n  fn " + slot + "() {\n" + body + "  }\n}\n"});
  }
  for (const auto& a : script.abilities) {
    const std::string text = lower(a.name + " " + a.description);
    std::string method;
    if (mentions(text, {"badly hurt", "rage"})) {
      method = "  fn get_power(move_name, base_power) {\n    if self.hp * 2 < self.max_hp {\n"
               "      return base_power * 3 / 2\n    }\n    return base_power\n  }\n";
    } else if (mentions(text, {"crushing", "jaw"})) {
      method = "  fn get_power(move_name, base_power) {\n    if base_power >= 60 {\n"
               "      return base_power * 5 / 4\n    }\n    return base_power\n  }\n";
    } else {
      method = "  fn set_boost(stat, n) {\n    if n < 0 {\n      return\n    }\n    boost_self(stat, n)\n  }\n";
    }
    out.steps.push_back({instructions[k++], "increment " + role + " {\n" + method + "}\n"});
  }
  return out.render();
}

std::string TemplateGenerator::complete(const proxy::PromptBundle& prompt) {
  if (prompt.template_version == kDesignTemplate) {
    const auto script = script_for(line_after(prompt.user, "Prototype: "), line_after(prompt.user, "Description: "));
    return "```json\n" + script.to_json().dump(2) + "\n```\n";
  }
  if (prompt.template_version == kCodeTemplate) {
    const auto script = core::RoleScript::from_json(json::parse(block_after(prompt.user, "Target script:")));
    return "```\n" + listing_for(script) + "```\n";
  }
  throw GenerationError("template generator: unsupported prompt '" + prompt.template_version + "'");
}

GenerateMode parse_generate_mode(const std::string& s) {
  if (s == "codesign") return GenerateMode::codesign;
  if (s == "synthetic") return GenerateMode::synthetic;
  throw Error("unknown generation mode '" + s + "'");
}

json GenerateReport::to_json() const {
  json list = json::array();
  for (const auto& a : attempts) {
    json j = {{"id", a.id}, {"prototype", a.prototype}, {"verdict", to_string(a.verdict)}};
    if (a.reason != RejectReason::none) j["reason"] = to_string(a.reason);
    if (!a.detail.empty()) j["detail"] = a.detail;
    list.push_back(j);
  }
  return {{"attempts", list}, {"accepted", accepted}, {"pending", pending}, {"rejected", rejected}};
}

GenerateReport generate_roles(const std::vector<Prototype>& prototypes, SamplePool& pool,
                              proxy::TextGenerator& designer, proxy::TextGenerator& coder,
                              const GenerateOptions& options) {
  if (prototypes.empty()) throw Error("generate: no prototypes");
  const bool codesign = options.mode == GenerateMode::codesign;
  const FilterOptions filter{options.threshold, codesign};
  GenerateReport report;
  for (std::size_t i = 0; i < options.count; ++i) {
    const Prototype& proto = prototypes[i % prototypes.size()];
    battle::Rng rng(eval::mix_seed(options.seed, i));
    GenerateReport::Attempt a;
    bool filtered = false;
    a.prototype = proto.name;
    a.id = std::string(codesign ? "codesign" : "synthetic") + "-" + std::to_string(options.seed) + "-" +
           std::to_string(i) + "-" + lower(core::role_name_for(proto.name));
    try {
      auto script = design_role(proto, pool, designer, rng,
                                codesign ? core::Provenance::codesign : core::Provenance::synthetic);
      auto state = code_role(script, pool, coder, rng);
      auto r = pool.submit({a.id, std::move(script), std::move(state)}, filter);
      filtered = true;
      a.verdict = r.verdict;
      a.reason = r.reason;
      a.detail = r.detail;
    } catch (const ValidationError& e) {
      const auto& d = e.diagnostics();
      const bool dangling = !d.empty() && std::all_of(d.begin(), d.end(), [](const dsl::Diagnostic& x) {
        return x.code == dsl::DiagCode::dangling_method;
      });
      a.reason = dangling ? RejectReason::dangling : RejectReason::compile;
      a.detail = e.what();
    } catch (const GenerationError& e) {
      a.reason = RejectReason::compile;
      a.detail = e.what();
    } catch (const ProxyError& e) {
      a.reason = RejectReason::compile;
      a.detail = e.what();
    } catch (const TargetMismatch& e) {
      a.reason = RejectReason::compile;
      a.detail = e.what();
    }
    // Failures raised before filtering are not in the pool log yet.
    if (!filtered) pool.record_rejection(a.id, a.reason, a.detail);
    switch (a.verdict) {
      case FilterVerdict::accept: ++report.accepted; break;
      case FilterVerdict::pending: ++report.pending; break;
      case FilterVerdict::reject: ++report.rejected; break;
    }
    report.attempts.push_back(std::move(a));
  }
  return report;
}

}  // namespace delta::data
