#include "delta/data/interest.hpp"

#include "delta/dsl/builtins.hpp"

namespace delta::data {

using namespace dsl;

std::optional<Tag> parse_tag(std::string_view name) {
  for (std::size_t i = 0; i < kTagCount; ++i) {
    if (kTagNames[i] == name) return static_cast<Tag>(i);
  }
  return std::nullopt;
}

std::vector<std::string> InterestVector::names() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kTagCount; ++i) {
    if (bits.test(i)) out.emplace_back(kTagNames[i]);
  }
  return out;
}

std::string InterestVector::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < kTagCount; ++i) s += bits.test(i) ? '1' : '0';
  return s;
}

nlohmann::json InterestVector::to_json() const {
  return {{"bits", to_string()}, {"tags", names()}, {"magnitude", magnitude()}};
}

namespace {

struct Tagger {
  InterestVector v;

  void expr(const ExprRef& e) {
    if (!e) return;
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, CallExpr>) {
            call(n.callee);
            for (const auto& a : n.args) expr(a);
          } else if constexpr (std::is_same_v<T, BinaryExpr>) {
            expr(n.lhs);
            expr(n.rhs);
          } else if constexpr (std::is_same_v<T, NotExpr>) {
            expr(n.operand);
          }
        },
        e->node);
  }

  void call(const std::string& callee) {
    if (callee == "boost_self" || callee == "boost_foe") v.set(Tag::stat_boost);
    if (callee == "set_types") v.set(Tag::type_change);
    if (callee == "heal") v.set(Tag::heal);
    if (callee == "recoil") v.set(Tag::recoil);
    if (callee == "inflict_status" || callee == "set_foe_flag") v.set(Tag::status_inflict);
    if (callee == "chance") v.set(Tag::rng_use);
    if (is_hook(callee)) {
      v.set(Tag::cross_hook_interaction);
      if (callee == "type_change") v.set(Tag::type_change);
    }
  }

  void block(const Block& b) {
    for (const auto& s : b) stmt(s);
  }

  void stmt(const Stmt& s) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, LetStmt>) {
            expr(n.value);
          } else if constexpr (std::is_same_v<T, AssignStmt>) {
            if (n.self_path) assign(n.target);
            expr(n.value);
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            v.set(Tag::conditional_logic);
            expr(n.condition);
            block(n.then_block);
            if (n.else_block) block(*n.else_block);
          } else if constexpr (std::is_same_v<T, ReturnStmt>) {
            expr(n.value);
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            expr(n.expr);
          }
        },
        s.node);
  }

  void assign(const std::vector<std::string>& target) {
    if (target.size() == 2 && target[0] == "flags" && target[1] == "protected") {
      v.set(Tag::protect);
    } else if (target.size() == 2 && target[0] == "flags" && target[1] == "priority") {
      v.set(Tag::priority);
    } else {
      v.set(Tag::multi_turn_state);
    }
  }

  // `return <second parameter>` and nothing else.
  static bool identity_power(const MethodDef& m) {
    if (m.params.size() != 2 || m.body.size() != 1) return false;
    const auto* r = std::get_if<ReturnStmt>(&m.body[0].node);
    if (!r || !r->value) return false;
    const auto* n = std::get_if<NameExpr>(&r->value->node);
    return n && n->name == m.params[1];
  }

  void method(const MethodDef& m) {
    for (const auto& d : core::default_hooks()) {
      if (d == m) return;
    }
    if (m.name == "get_power" && !identity_power(m)) v.set(Tag::power_boost);
    if (m.name == "type_change") v.set(Tag::type_change);
    if (m.name == "set_boost") v.set(Tag::cross_hook_interaction);
    block(m.body);
  }
};

}  // namespace

InterestVector tag_methods(const std::vector<MethodDef>& methods) {
  Tagger t;
  for (const auto& m : methods) t.method(m);
  return t.v;
}

InterestVector tag_interest(const core::EngineState& state) {
  InterestVector v = tag_methods(state.initial_role().methods);
  for (const auto& h : state.history()) v |= tag_methods(h.delta.methods);
  return v;
}

}  // namespace delta::data
