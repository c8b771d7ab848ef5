#include "delta/data/filter.hpp"

#include <set>

#include "delta/battle/battle.hpp"
#include "delta/dsl/builtins.hpp"
#include "delta/dsl/parser.hpp"
#include "delta/dsl/validator.hpp"
#include "delta/error.hpp"

namespace delta::data {

using namespace dsl;

const char* to_string(FilterVerdict v) {
  switch (v) {
    case FilterVerdict::accept: return "accept";
    case FilterVerdict::reject: return "reject";
    case FilterVerdict::pending: return "pending";
  }
  return "?";
}

const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::none: return "none";
    case RejectReason::compile: return "compile";
    case RejectReason::dangling: return "dangling";
    case RejectReason::interest: return "interest";
  }
  return "?";
}

nlohmann::json FilterResult::to_json() const {
  nlohmann::json j = {{"verdict", to_string(verdict)}, {"toi", toi.to_json()}};
  if (reason != RejectReason::none) j["reason"] = to_string(reason);
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

namespace {

void collect_calls(const ExprRef& e, std::set<std::string>& out);

void collect_calls(const Block& b, std::set<std::string>& out) {
  for (const auto& s : b) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, LetStmt> || std::is_same_v<T, AssignStmt> ||
                        std::is_same_v<T, ReturnStmt>) {
            collect_calls(n.value, out);
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            collect_calls(n.expr, out);
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            collect_calls(n.condition, out);
            collect_calls(n.then_block, out);
            if (n.else_block) collect_calls(*n.else_block, out);
          }
        },
        s.node);
  }
}

void collect_calls(const ExprRef& e, std::set<std::string>& out) {
  if (!e) return;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CallExpr>) {
          out.insert(n.callee);
          for (const auto& a : n.args) collect_calls(a, out);
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          collect_calls(n.lhs, out);
          collect_calls(n.rhs, out);
        } else if constexpr (std::is_same_v<T, NotExpr>) {
          collect_calls(n.operand, out);
        }
      },
      e->node);
}

FilterResult reject(RejectReason r, std::string detail, InterestVector toi = {}) {
  return {FilterVerdict::reject, r, std::move(detail), toi};
}

}  // namespace

std::vector<std::string> unreachable_methods(const RoleAst& role) {
  std::set<std::string> reached;
  std::vector<const MethodDef*> work;
  for (const auto& m : role.methods) {
    if (is_move_slot(m.name) || is_hook(m.name)) {
      reached.insert(m.name);
      work.push_back(&m);
    }
  }
  while (!work.empty()) {
    const MethodDef* m = work.back();
    work.pop_back();
    std::set<std::string> calls;
    collect_calls(m->body, calls);
    for (const auto& c : calls) {
      const MethodDef* callee = role.find_method(c);
      if (callee && reached.insert(c).second) work.push_back(callee);
    }
  }
  std::vector<std::string> out;
  for (const auto& m : role.methods) {
    if (!reached.count(m.name)) out.push_back(m.name);
  }
  return out;
}

FilterResult filter_instance(const core::RoleScript& script, const core::EngineState& state,
                             const FilterOptions& options) {
  auto diags = validate(state.role());
  if (has_errors(diags)) return reject(RejectReason::compile, summarize(diags));
  try {
    battle::make_battle_role(state);
  } catch (const Error& e) {
    return reject(RejectReason::compile, e.what());
  }
  if (state.move_slots().size() != script.moves.size()) {
    return reject(RejectReason::compile, "code has " + std::to_string(state.move_slots().size()) +
                                             " move slots, script lists " + std::to_string(script.moves.size()));
  }
  const InterestVector toi = tag_interest(state);
  if (auto d = unreachable_methods(state.role()); !d.empty()) {
    std::string names;
    for (const auto& n : d) names += (names.empty() ? "" : ", ") + n;
    return reject(RejectReason::dangling, "never called: " + names, toi);
  }
  if (toi.magnitude() < options.threshold) {
    return reject(RejectReason::interest,
                  "interest " + std::to_string(toi.magnitude()) + " below " + std::to_string(options.threshold), toi);
  }
  return {options.human_checkpoint ? FilterVerdict::pending : FilterVerdict::accept, RejectReason::none, {}, toi};
}

FilterResult filter_source(const core::RoleScript& script, std::string_view role_source,
                           const FilterOptions& options) {
  try {
    return filter_instance(script, core::EngineState(parse_role(role_source)), options);
  } catch (const DiagnosticError& e) {
    return reject(RejectReason::compile, e.what());
  }
}

}  // namespace delta::data
