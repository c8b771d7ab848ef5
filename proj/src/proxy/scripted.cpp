#include "delta/proxy/scripted.hpp"

#include <algorithm>
#include <stdexcept>

#include "delta/dsl/printer.hpp"
#include "delta/error.hpp"

namespace delta::proxy {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string substitute_role(std::string text, const std::string& role) {
  constexpr std::string_view key = "{{role}}";
  for (std::size_t pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + role.size())) {
    text.replace(pos, key.size(), role);
  }
  return text;
}

std::string fence(const std::string& code) { return "Here is the increment.\n```\n" + code + "```\n"; }

// Printable move title from the instruction text.
std::string title_from(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (out.size() >= 24) break;
    if (c == '"' || c == '\\' || c == '\n' || c == '\t') continue;
    out += c;
  }
  return out.empty() ? std::string("Move") : out;
}

}  // namespace

ScriptedProxy::ScriptedProxy(std::vector<Rule> rules, Fallback fallback)
    : rules_(std::move(rules)), fallback_(fallback) {
  if (rules_.empty() && fallback_ == Fallback::identity) {
    throw std::invalid_argument("ScriptedProxy needs a rule or a non-identity fallback");
  }
}

ScriptedProxy& ScriptedProxy::fail_from_step(std::size_t step) {
  fail_from_step_ = step;
  return *this;
}

ScriptedProxy ScriptedProxy::from_json(const nlohmann::json& j) {
  std::vector<Rule> rules;
  for (const auto& r : j.at("rules")) {
    rules.push_back(Rule{r.at("pattern").get<std::string>(), r.value("select", std::vector<std::string>{}),
                         r.at("delta").get<std::string>()});
  }
  Fallback fb = Fallback::identity;
  const std::string f = j.value("fallback", "identity");
  if (f == "failure") fb = Fallback::failure;
  else if (f == "grow") fb = Fallback::grow;
  else if (f != "identity") throw Error("scripted proxy: unknown fallback '" + f + "'");
  ScriptedProxy p(std::move(rules), fb);
  if (j.contains("fail_from_step") && !j.at("fail_from_step").is_null()) {
    p.fail_from_step(j.at("fail_from_step").get<std::size_t>());
  }
  return p;
}

const ScriptedProxy::Rule* ScriptedProxy::match(const std::string& text) const {
  for (const auto& r : rules_) {
    if (!r.pattern.empty() && r.pattern.back() == '*') {
      std::string_view prefix(r.pattern.data(), r.pattern.size() - 1);
      if (std::string_view(text).substr(0, prefix.size()) == prefix) return &r;
    } else if (r.pattern == text) {
      return &r;
    }
  }
  return nullptr;
}

std::vector<std::string> ScriptedProxy::select_entries(const core::Skeleton& skeleton, const core::Instruction& x) {
  if (const Rule* r = match(x.text)) return r->select;
  const auto names = skeleton.names();
  auto has = [&](const char* n) { return std::find(names.begin(), names.end(), n) != names.end(); };
  if (fallback_ == Fallback::grow && has("get_power")) return {"get_power"};
  if (has("move_1")) return {"move_1"};
  if (!names.empty()) return {names.front()};
  return {};
}

std::string ScriptedProxy::generate_delta(const core::RetrievedContext& context, const core::Instruction& x) {
  if (fail_from_step_ && context.source_step >= *fail_from_step_) return std::string(kUnparseable);
  if (const Rule* r = match(x.text)) return fence(substitute_role(r->delta_source, context.role_name));

  switch (fallback_) {
    case Fallback::failure:
      return std::string(kUnparseable);
    case Fallback::grow: {
      const std::uint64_t h = fnv1a(x.text);
      const std::string slot = "move_" + std::to_string(10 + h % 990);
      const std::string power = std::to_string(30 + (h >> 16) % 70);
      std::string code = "increment " + context.role_name + " {\n  fn " + slot + "() {\n    deal_damage(\"" +
                         title_from(x.text) + "\", " + power +
                         ", \"Normal\", \"special\")\n    if chance(30) {\n      boost_self(\"spe\", 1)\n    }\n  }\n}\n";
      return fence(code);
    }
    case Fallback::identity:
      break;
  }
  dsl::DeltaAst identity;
  identity.target = context.role_name;
  if (!context.entries.empty()) identity.methods.push_back(context.entries.front());
  return fence(dsl::print(identity));
}

}  // namespace delta::proxy
