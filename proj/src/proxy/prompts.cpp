#include "delta/proxy/prompts.hpp"

#include <cctype>

#include "delta/error.hpp"

namespace delta::proxy {

namespace {

constexpr std::string_view kSystem =
    "You extend the source code of a creature in a turn-based battle game. The code is written in a small "
    "sandboxed role language. Follow the requested output format exactly.";

constexpr std::string_view kCheatSheet = R"(role language reference
  increment NAME { fn m(a, b) { ... } ... }   methods to add; an existing name is replaced
  statements (one per line): let x = e | x = e | self.flags.f = e | self.FIELD = e
                             if e { ... } else { ... } | return e | e
  operators: + - * / % < <= > >= == != and or not, parentheses
  literals: 12, 0.5, "text", true, false
  read-only: self.hp self.max_hp self.atk self.def self.spa self.spd self.spe self.level self.type1 self.type2
             self.stages.STAT, foe.<same attributes>, foe.flags.F, battle.turn
  writable:  self.flags.F (turns remaining; 0 clears), fields declared with let in the role
  hooks: get_power(move_name, base_power) -> power; set_boost(stat, n); type_change(t1, t2)
  moves: move_1, move_2, ... take no parameters and run when the move is chosen
  builtins: deal_damage(name, power, type, category) boost_self(stat, n) boost_foe(stat, n)
            set_types(t1, t2) heal(n) recoil(n) inflict_status(status, turns) set_foe_flag(f, turns)
            chance(percent) has_type(t) foe_has_type(t) min(a, b) max(a, b) abs(x) floor(x)
  flags: protected blocks the next incoming attack; priority moves first next turn
  every method you add must be a hook, a move_N, or be called by another method)";

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

}  // namespace

std::string_view grammar_cheat_sheet() { return kCheatSheet; }

PromptBundle build_entry_prompt(const core::Skeleton& skeleton, const core::Instruction& x) {
  PromptBundle p;
  p.system = std::string(kSystem);
  p.user = "Here is the skeleton of the role's code: fields and method signatures, bodies omitted.\n\n";
  p.user += skeleton.render();
  p.user += "\nInstruction:\n";
  p.user += x.text;
  p.user +=
      "\n\nWhich existing methods do you need to read to implement the instruction? Answer with method names "
      "from the skeleton, one per line, and nothing else.\n";
  p.max_tokens = 128;
  p.temperature = kSelectTemperature;
  p.template_version = std::string(kTemplateVersion);
  return p;
}

PromptBundle build_delta_prompt(const core::RetrievedContext& context, const core::Instruction& x) {
  PromptBundle p;
  p.system = std::string(kSystem);
  p.user = "Role: " + context.role_name + "\n\nCurrent implementation of the relevant methods:\n\n";
  p.user += context.render();
  p.user += "\n";
  p.user += kCheatSheet;
  p.user += "\n\nInstruction:\n";
  p.user += x.text;
  p.user += "\n\nWrite the increment for role " + context.role_name +
            " that implements the instruction. Answer with exactly one fenced code block containing a single "
            "program of the form:\n```\nincrement " +
            context.role_name + " {\n  fn ...\n}\n```\n";
  p.max_tokens = 1024;
  p.temperature = kGenerateTemperature;
  p.template_version = std::string(kTemplateVersion);
  return p;
}

std::string extract_delta(std::string_view response) {
  const std::size_t open = response.find("```");
  std::string out;
  if (open == std::string_view::npos) {
    out = trim(response);
  } else {
    std::size_t body = response.find('\n', open);
    body = body == std::string_view::npos ? response.size() : body + 1;
    const std::size_t close = response.find("```", body);
    out = trim(response.substr(body, close == std::string_view::npos ? std::string_view::npos : close - body));
  }
  if (out.empty()) throw EmptyResponse();
  return out;
}

std::vector<std::string> parse_entry_names(std::string_view response) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= response.size()) {
    std::size_t nl = response.find('\n', pos);
    if (nl == std::string_view::npos) nl = response.size();
    std::string line = trim(response.substr(pos, nl - pos));
    pos = nl + 1;
    while (!line.empty() && (line.front() == '-' || line.front() == '*' || line.front() == '`' ||
                             std::isdigit(static_cast<unsigned char>(line.front())) || line.front() == '.' ||
                             line.front() == ' ')) {
      if (std::isdigit(static_cast<unsigned char>(line.front()))) {
        // "1. name" / "2) name"
        std::size_t k = 0;
        while (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) ++k;
        if (k < line.size() && (line[k] == '.' || line[k] == ')')) {
          line.erase(0, k + 1);
          continue;
        }
        break;
      }
      line.erase(line.begin());
    }
    while (!line.empty() && (line.back() == '`' || line.back() == ',')) line.pop_back();
    if (line.size() > 2 && line.compare(line.size() - 2, 2, "()") == 0) line.resize(line.size() - 2);
    line = trim(line);
    if (is_identifier(line)) out.push_back(line);
  }
  return out;
}

}  // namespace delta::proxy
