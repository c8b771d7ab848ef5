#include "delta/core/engine.hpp"

#include <algorithm>
#include <set>

#include "delta/battle/types.hpp"
#include "delta/dsl/builtins.hpp"
#include "delta/dsl/parser.hpp"
#include "delta/dsl/validator.hpp"
#include "delta/error.hpp"

namespace delta::core {

using dsl::DeltaAst;
using dsl::MethodDef;
using dsl::RoleAst;

namespace {

constexpr int kDefaultPower = 40;

constexpr const char* kDefaultHooksSource = R"(increment Base {
  fn get_power(m, b) {
    return b
  }

  fn set_boost(stat, n) {
    boost_self(stat, n)
  }

  fn type_change(t1, t2) {
    set_types(t1, t2)
  }
}
)";

}  // namespace

const char* to_string(Author a) {
  switch (a) {
    case Author::player: return "player";
    case Author::pipeline: return "pipeline";
    case Author::fuzzer: return "fuzzer";
  }
  return "player";
}

Author parse_author(const std::string& s) {
  if (s == "pipeline") return Author::pipeline;
  if (s == "fuzzer") return Author::fuzzer;
  return Author::player;
}

const std::vector<MethodDef>& default_hooks() {
  static const std::vector<MethodDef> hooks = dsl::parse_delta(kDefaultHooksSource).methods;
  return hooks;
}

EngineState::EngineState(RoleAst initial) : initial_(initial), role_(std::move(initial)), hooks_(default_hooks()) {}

const MethodDef* EngineState::lookup(std::string_view name) const {
  if (const auto* m = role_.find_method(name)) return m;
  for (const auto& h : hooks_) {
    if (h.name == name) return &h;
  }
  return nullptr;
}

std::vector<std::string> EngineState::method_names() const {
  std::vector<std::string> out;
  for (const auto* m : resolved_methods()) out.push_back(m->name);
  return out;
}

std::vector<const MethodDef*> EngineState::resolved_methods() const {
  std::vector<const MethodDef*> out;
  for (const auto& h : hooks_) out.push_back(lookup(h.name));
  for (const auto& m : role_.methods) {
    if (std::none_of(hooks_.begin(), hooks_.end(), [&](const MethodDef& h) { return h.name == m.name; })) {
      out.push_back(&m);
    }
  }
  return out;
}

RoleAst EngineState::full_program() const {
  RoleAst out;
  out.name = role_.name;
  out.fields = role_.fields;
  for (const auto* m : resolved_methods()) out.methods.push_back(*m);
  return out;
}

std::vector<std::string> EngineState::move_slots() const {
  std::vector<std::pair<int, std::string>> slots;
  for (const auto& m : role_.methods) {
    if (auto idx = dsl::move_slot_index(m.name)) slots.emplace_back(*idx, m.name);
  }
  std::sort(slots.begin(), slots.end());
  std::vector<std::string> out;
  for (auto& s : slots) out.push_back(std::move(s.second));
  return out;
}

void check_script(const RoleScript& script) {
  if (script.species.empty()) throw ScriptError("script: species is empty");
  if (script.types.empty() || script.types.size() > 2) throw ScriptError("script: a role has one or two types");
  for (const auto& t : script.types) {
    if (!battle::parse_type(t)) throw ScriptError("script: unknown type '" + t + "'");
  }
  if (script.types.size() == 2 && script.types[0] == script.types[1]) {
    throw ScriptError("script: the two types must differ");
  }
  const auto& s = script.stats;
  for (int v : {s.hp, s.atk, s.def, s.spa, s.spd, s.spe}) {
    if (v < 1 || v > 255) throw ScriptError("script: base stats must lie in [1, 255]");
  }
  if (script.moves.empty()) throw ScriptError("script: at least one move is required");
  for (const auto& m : script.moves) {
    if (m.name.empty()) throw ScriptError("script: move without a name");
    if (m.base_power && (*m.base_power < 0 || *m.base_power > 250)) {
      throw ScriptError("script: move '" + m.name + "' power must lie in [0, 250]");
    }
    if (m.type && !battle::parse_type(*m.type)) throw ScriptError("script: move '" + m.name + "' has unknown type");
  }
}

EngineState init_engine(const RoleScript& script) {
  check_script(script);
  RoleAst role;
  role.name = role_name_for(script.species);
  auto field = [&](std::string name, dsl::Literal v) { role.fields.push_back({std::move(name), std::move(v), {}}); };
  field("species", dsl::Literal{script.species});
  field("primary_type", dsl::Literal{script.types[0]});
  field("secondary_type", dsl::Literal{script.types.size() > 1 ? script.types[1] : std::string()});
  field("hp_base", dsl::Literal{std::int64_t{script.stats.hp}});
  field("atk_base", dsl::Literal{std::int64_t{script.stats.atk}});
  field("def_base", dsl::Literal{std::int64_t{script.stats.def}});
  field("spa_base", dsl::Literal{std::int64_t{script.stats.spa}});
  field("spd_base", dsl::Literal{std::int64_t{script.stats.spd}});
  field("spe_base", dsl::Literal{std::int64_t{script.stats.spe}});

  for (std::size_t i = 0; i < script.moves.size(); ++i) {
    const auto& mv = script.moves[i];
    MethodDef m;
    m.name = "move_" + std::to_string(i + 1);
    m.body.push_back(dsl::make_expr_stmt(dsl::make_call(
        "deal_damage", {dsl::make_string(mv.name), dsl::make_int(mv.base_power.value_or(kDefaultPower)),
                        dsl::make_string(mv.type.value_or(script.types[0])),
                        dsl::make_string(to_string(mv.category.value_or(MoveCategory::physical)))})));
    role.methods.push_back(std::move(m));
  }
  auto diags = dsl::validate(role);
  if (dsl::has_errors(diags)) throw ScriptError("script produced invalid code: " + dsl::summarize(diags));
  return EngineState(std::move(role));
}

RoleAst apply_delta(const RoleAst& role, const DeltaAst& delta) {
  RoleAst out = role;
  for (const auto& m : delta.methods) {
    auto it = std::find_if(out.methods.begin(), out.methods.end(), [&](const MethodDef& x) { return x.name == m.name; });
    if (it != out.methods.end()) {
      *it = m;
    } else {
      out.methods.push_back(m);
    }
  }
  return out;
}

EngineState merge(const DeltaAst& delta, const EngineState& state, const Instruction& instruction,
                  std::vector<std::string> selected) {
  if (delta.target != state.role().name) throw TargetMismatch(delta.target, state.role().name);
  auto diags = dsl::validate(delta, state.role());
  if (dsl::has_errors(diags)) throw ValidationError(std::move(diags));
  EngineState next = state;
  next.role_ = apply_delta(state.role(), delta);
  next.history_.push_back(HistoryEntry{instruction, delta, std::move(selected)});
  return next;
}

RoleAst replay(const RoleAst& initial, const std::vector<HistoryEntry>& history) {
  RoleAst role = initial;
  for (const auto& h : history) role = apply_delta(role, h.delta);
  return role;
}

EngineState rebuild(const RoleAst& initial, const std::vector<HistoryEntry>& history) {
  EngineState state(initial);
  for (const auto& h : history) state = merge(h.delta, state, h.instruction, h.selected);
  return state;
}

}  // namespace delta::core
