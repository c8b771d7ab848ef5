#include <cmath>
#include <limits>

#include "delta/battle/battle.hpp"
#include "delta/dsl/builtins.hpp"
#include "delta/dsl/printer.hpp"

namespace delta::battle {

namespace {

using dsl::Builtin;
using dsl::Span;
using K = RuntimeErrorKind;

constexpr std::int64_t kMaxPower = 1'000'000;
constexpr std::array<std::string_view, 4> kStatuses{"burn", "poison", "paralysis", "sleep"};

struct Fault {
  RuntimeError error;
};

struct Flow {
  bool returned = false;
  Value value;
};

bool is_number(const Value& v) { return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v); }

double as_double(const Value& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

// Executes role methods against a battle. One machine per top-level action;
// the step budget and call depth are shared by everything the action runs,
// including hooks of the other side it triggers.
class Machine {
 public:
  explicit Machine(BattleState& b) : b_(b) {}

  Value call(SideId side, const std::string& name, std::vector<Value> args, const Span& at) {
    const dsl::MethodDef* m = b_.side(side).program.find_method(name);
    if (!m) fault(K::unknown_identifier, at, "no method '" + name + "'");
    if (m->params.size() != args.size()) {
      fault(K::type_mismatch, at, "'" + name + "' expects " + std::to_string(m->params.size()) + " arguments");
    }
    if (++depth_ > kMaxCallDepth) fault(K::depth_exceeded, at, "call depth exceeds " + std::to_string(kMaxCallDepth));
    Frame f{side, m, {{}}};
    for (std::size_t i = 0; i < args.size(); ++i) f.scopes.back()[m->params[i]] = std::move(args[i]);
    frames_.push_back(std::move(f));
    Flow flow = exec_block(m->body, false);
    frames_.pop_back();
    --depth_;
    return flow.value;
  }

 private:
  struct Frame {
    SideId side;
    const dsl::MethodDef* method;
    std::vector<std::map<std::string, Value>> scopes;
  };

  [[noreturn]] void fault(K kind, const Span& span, std::string message) {
    RuntimeError e;
    e.kind = kind;
    e.span = span;
    e.message = std::move(message);
    if (!frames_.empty()) {
      e.side = frames_.back().side;
      e.method = frames_.back().method->name;
    } else {
      e.side = origin_;
    }
    throw Fault{std::move(e)};
  }

  void tick(const Span& at) {
    if (++steps_ > kStepBudget) fault(K::budget_exceeded, at, "step budget of " + std::to_string(kStepBudget) + " exhausted");
  }

  Frame& frame() { return frames_.back(); }
  SideId me() const { return frames_.back().side; }
  BattleRole& self() { return b_.side(me()); }
  BattleRole& foe() { return b_.side(other(me())); }

  Value* find_local(const std::string& name) {
    auto& scopes = frame().scopes;
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  Flow exec_block(const dsl::Block& block, bool push) {
    if (push) frame().scopes.emplace_back();
    Flow out;
    for (const auto& s : block) {
      out = exec(s);
      if (out.returned) break;
    }
    if (push) frame().scopes.pop_back();
    return out;
  }

  Flow exec(const dsl::Stmt& s) {
    tick(s.span);
    return std::visit(
        [&](const auto& n) -> Flow {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, dsl::LetStmt>) {
            frame().scopes.back()[n.name] = eval(*n.value);
          } else if constexpr (std::is_same_v<T, dsl::AssignStmt>) {
            Value v = eval(*n.value);
            assign(n, std::move(v), s.span);
          } else if constexpr (std::is_same_v<T, dsl::IfStmt>) {
            if (truthy(eval(*n.condition), n.condition->span)) return exec_block(n.then_block, true);
            if (n.else_block) return exec_block(*n.else_block, true);
          } else if constexpr (std::is_same_v<T, dsl::ReturnStmt>) {
            return Flow{true, n.value ? eval(*n.value) : Value{}};
          } else if constexpr (std::is_same_v<T, dsl::ExprStmt>) {
            eval(*n.expr);
          }
          return Flow{};
        },
        s.node);
  }

  bool truthy(const Value& v, const Span& at) {
    if (auto* x = std::get_if<bool>(&v)) return *x;
    fault(K::type_mismatch, at, "condition is " + describe(v) + ", not a boolean");
  }

  void assign(const dsl::AssignStmt& a, Value v, const Span& at) {
    if (!a.self_path) {
      Value* slot = find_local(a.target.front());
      if (!slot) fault(K::unknown_identifier, at, "unknown name '" + a.target.front() + "'");
      *slot = std::move(v);
      return;
    }
    if (a.target.size() == 2 && a.target[0] == "flags") {
      set_flag(me(), a.target[1], v, at);
      return;
    }
    if (a.target.size() == 1) {
      auto it = self().fields.find(a.target[0]);
      if (it == self().fields.end()) fault(K::unknown_identifier, at, "unknown field 'self." + a.target[0] + "'");
      it->second = std::move(v);
      return;
    }
    fault(K::unknown_identifier, at, "cannot assign to this path");
  }

  void set_flag(SideId target, const std::string& flag, const Value& v, const Span& at) {
    std::int64_t n = 0;
    if (auto* i = std::get_if<std::int64_t>(&v)) {
      n = *i;
    } else if (auto* bl = std::get_if<bool>(&v)) {
      n = *bl ? 1 : 0;
    } else {
      fault(K::type_mismatch, at, "flag '" + flag + "' needs an integer, got " + describe(v));
    }
    if (n < 0) fault(K::domain_violation, at, "flag '" + flag + "' cannot be negative");
    auto& flags = b_.side(target).flags;
    if (n == 0) flags.erase(flag);
    else flags[flag] = n;
    emit(EventKind::flag_set, {{"target", to_string(target)}, {"flag", flag}, {"value", n}});
  }

  void emit(EventKind kind, nlohmann::json payload) {
    b_.log.push_back(Event{b_.turn, to_string(me()), kind, std::move(payload)});
  }

  Value eval(const dsl::Expr& e) {
    tick(e.span);
    return std::visit(
        [&](const auto& n) -> Value {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, dsl::LiteralExpr>) {
            return std::visit([](const auto& x) -> Value { return x; }, n.value.value);
          } else if constexpr (std::is_same_v<T, dsl::NameExpr>) {
            Value* v = find_local(n.name);
            if (!v) fault(K::unknown_identifier, e.span, "unknown name '" + n.name + "'");
            return *v;
          } else if constexpr (std::is_same_v<T, dsl::PathExpr>) {
            return read_path(n, e.span);
          } else if constexpr (std::is_same_v<T, dsl::CallExpr>) {
            std::vector<Value> args;
            args.reserve(n.args.size());
            for (const auto& a : n.args) args.push_back(eval(*a));
            return invoke_callable(n.callee, std::move(args), e.span);
          } else if constexpr (std::is_same_v<T, dsl::BinaryExpr>) {
            return binary(n, e.span);
          } else {
            return Value{!truthy(eval(*n.operand), n.operand->span)};
          }
        },
        e.node);
  }

  Value read_path(const dsl::PathExpr& p, const Span& at) {
    const auto& segs = p.segments;
    if (p.root == dsl::PathRoot::battle) {
      if (segs.size() == 1 && segs[0] == "turn") return std::int64_t{b_.turn};
      fault(K::unknown_identifier, at, "unknown battle attribute");
    }
    const BattleRole& r = p.root == dsl::PathRoot::self ? self() : foe();
    const char* root = p.root == dsl::PathRoot::self ? "self." : "foe.";
    if (segs.size() == 2 && segs[0] == "flags") return r.flag(segs[1]);
    if (segs.size() == 2 && segs[0] == "stages" && dsl::is_stage_stat(segs[1])) return std::int64_t{r.stage(segs[1])};
    if (segs.size() == 1) {
      const auto& a = segs[0];
      if (a == "hp") return std::int64_t{r.hp};
      if (a == "max_hp") return std::int64_t{r.max_hp};
      if (a == "atk") return std::int64_t{r.stats.atk};
      if (a == "def") return std::int64_t{r.stats.def};
      if (a == "spa") return std::int64_t{r.stats.spa};
      if (a == "spd") return std::int64_t{r.stats.spd};
      if (a == "spe") return std::int64_t{r.stats.spe};
      if (a == "level") return std::int64_t{r.level};
      if (a == "type1") return std::string(to_string(r.types.at(0)));
      if (a == "type2") return r.types.size() > 1 ? std::string(to_string(r.types[1])) : std::string();
      if (p.root == dsl::PathRoot::self) {
        auto it = r.fields.find(a);
        if (it != r.fields.end()) return it->second;
      }
    }
    std::string path;
    for (const auto& s : segs) path += (path.empty() ? "" : ".") + s;
    fault(K::unknown_identifier, at, std::string("unknown attribute '") + root + path + "'");
  }

  Value binary(const dsl::BinaryExpr& n, const Span& at) {
    using Op = dsl::BinaryOp;
    if (n.op == Op::logical_and || n.op == Op::logical_or) {
      bool l = truthy(eval(*n.lhs), n.lhs->span);
      if (n.op == Op::logical_and && !l) return false;
      if (n.op == Op::logical_or && l) return true;
      return truthy(eval(*n.rhs), n.rhs->span);
    }
    Value l = eval(*n.lhs);
    Value r = eval(*n.rhs);
    const char* op = dsl::to_string(n.op);

    if (n.op == Op::eq || n.op == Op::ne) {
      bool eq;
      if (is_number(l) && is_number(r)) {
        if (std::holds_alternative<std::int64_t>(l) && std::holds_alternative<std::int64_t>(r)) {
          eq = std::get<std::int64_t>(l) == std::get<std::int64_t>(r);
        } else {
          eq = as_double(l) == as_double(r);
        }
      } else {
        eq = l == r;
      }
      return n.op == Op::eq ? eq : !eq;
    }

    if (!is_number(l) || !is_number(r)) {
      fault(K::type_mismatch, at, std::string("'") + op + "' needs numbers, got " + describe(l) + " and " + describe(r));
    }
    const bool ints = std::holds_alternative<std::int64_t>(l) && std::holds_alternative<std::int64_t>(r);
    switch (n.op) {
      case Op::lt: return ints ? std::get<std::int64_t>(l) < std::get<std::int64_t>(r) : as_double(l) < as_double(r);
      case Op::le: return ints ? std::get<std::int64_t>(l) <= std::get<std::int64_t>(r) : as_double(l) <= as_double(r);
      case Op::gt: return ints ? std::get<std::int64_t>(l) > std::get<std::int64_t>(r) : as_double(l) > as_double(r);
      case Op::ge: return ints ? std::get<std::int64_t>(l) >= std::get<std::int64_t>(r) : as_double(l) >= as_double(r);
      default: break;
    }
    if (ints) return int_arith(n.op, std::get<std::int64_t>(l), std::get<std::int64_t>(r), at);
    return real_arith(n.op, as_double(l), as_double(r), at);
  }

  Value int_arith(dsl::BinaryOp op, std::int64_t a, std::int64_t b, const Span& at) {
    using Op = dsl::BinaryOp;
    std::int64_t out = 0;
    bool overflow = false;
    switch (op) {
      case Op::add: overflow = __builtin_add_overflow(a, b, &out); break;
      case Op::sub: overflow = __builtin_sub_overflow(a, b, &out); break;
      case Op::mul: overflow = __builtin_mul_overflow(a, b, &out); break;
      case Op::div:
      case Op::mod: {
        if (b == 0) fault(K::divide_by_zero, at, op == Op::div ? "division by zero" : "modulo by zero");
        if (a == std::numeric_limits<std::int64_t>::min() && b == -1) {
          overflow = true;
          break;
        }
        // floor semantics
        std::int64_t q = a / b, r = a % b;
        if (r != 0 && ((r < 0) != (b < 0))) {
          --q;
          r += b;
        }
        out = op == Op::div ? q : r;
        break;
      }
      default: break;
    }
    if (overflow) fault(K::domain_violation, at, "integer overflow");
    return out;
  }

  Value real_arith(dsl::BinaryOp op, double a, double b, const Span& at) {
    using Op = dsl::BinaryOp;
    double out = 0;
    switch (op) {
      case Op::add: out = a + b; break;
      case Op::sub: out = a - b; break;
      case Op::mul: out = a * b; break;
      case Op::div:
      case Op::mod:
        if (b == 0) fault(K::divide_by_zero, at, op == Op::div ? "division by zero" : "modulo by zero");
        out = op == Op::div ? a / b : a - b * std::floor(a / b);
        break;
      default: break;
    }
    if (!std::isfinite(out)) fault(K::domain_violation, at, "non-finite result");
    return out;
  }

  // -- builtins ------------------------------------------------------------

  const std::string& str_arg(const std::vector<Value>& args, std::size_t i, const char* fn, const Span& at) {
    if (auto* s = std::get_if<std::string>(&args[i])) return *s;
    fault(K::type_mismatch, at, std::string(fn) + ": argument " + std::to_string(i + 1) + " must be a string, got " +
                                    describe(args[i]));
  }

  std::int64_t int_arg(const std::vector<Value>& args, std::size_t i, const char* fn, const Span& at) {
    if (auto* v = std::get_if<std::int64_t>(&args[i])) return *v;
    if (auto* d = std::get_if<double>(&args[i])) {
      if (std::abs(*d) < 9e15) return static_cast<std::int64_t>(std::floor(*d));
      fault(K::domain_violation, at, std::string(fn) + ": number out of range");
    }
    fault(K::type_mismatch, at, std::string(fn) + ": argument " + std::to_string(i + 1) + " must be a number, got " +
                                    describe(args[i]));
  }

  double num_arg(const std::vector<Value>& args, std::size_t i, const char* fn, const Span& at) {
    if (is_number(args[i])) return as_double(args[i]);
    fault(K::type_mismatch, at, std::string(fn) + ": argument " + std::to_string(i + 1) + " must be a number, got " +
                                    describe(args[i]));
  }

  Type type_arg(const std::vector<Value>& args, std::size_t i, const char* fn, const Span& at) {
    const auto& s = str_arg(args, i, fn, at);
    auto t = parse_type(s);
    if (!t) fault(K::domain_violation, at, std::string(fn) + ": unknown type '" + s + "'");
    return *t;
  }

  const std::string& stat_arg(const std::vector<Value>& args, std::size_t i, const char* fn, const Span& at) {
    const auto& s = str_arg(args, i, fn, at);
    if (!dsl::is_stage_stat(s)) fault(K::domain_violation, at, std::string(fn) + ": unknown stat '" + s + "'");
    return s;
  }

  Value invoke_callable(const std::string& callee, std::vector<Value> args, const Span& at) {
    auto bi = dsl::find_builtin(callee);
    if (!bi) return call(me(), callee, std::move(args), at);
    if (static_cast<int>(args.size()) != bi->arity) {
      fault(K::type_mismatch, at, callee + " expects " + std::to_string(bi->arity) + " arguments");
    }
    const char* fn = bi->name.data();
    switch (bi->id) {
      case Builtin::deal_damage: return deal_damage(args, at);
      case Builtin::boost_self: {
        const auto& stat = stat_arg(args, 0, fn, at);
        apply_boost(me(), stat, int_arg(args, 1, fn, at));
        return None{};
      }
      case Builtin::boost_foe: {
        const auto stat = stat_arg(args, 0, fn, at);
        const auto n = int_arg(args, 1, fn, at);
        // the receiving side's hook decides what an incoming boost does
        call(other(me()), "set_boost", {stat, n}, at);
        return None{};
      }
      case Builtin::set_types: {
        Type t1 = type_arg(args, 0, fn, at);
        std::vector<Type> types{t1};
        if (!str_arg(args, 1, fn, at).empty()) {
          Type t2 = type_arg(args, 1, fn, at);
          if (t2 != t1) types.push_back(t2);
        }
        self().types = types;
        nlohmann::json names = nlohmann::json::array();
        for (Type t : types) names.push_back(std::string(to_string(t)));
        emit(EventKind::type_change, {{"target", to_string(me())}, {"types", names}});
        return None{};
      }
      case Builtin::heal: {
        auto n = int_arg(args, 0, fn, at);
        if (n < 0) fault(K::domain_violation, at, "heal: amount cannot be negative");
        auto& r = self();
        const std::int64_t amount = std::min<std::int64_t>(n, r.max_hp - r.hp);
        r.hp += static_cast<int>(amount);
        emit(EventKind::heal, {{"target", to_string(me())}, {"amount", amount}, {"hp", r.hp}});
        return amount;
      }
      case Builtin::recoil: {
        auto n = int_arg(args, 0, fn, at);
        if (n < 0) fault(K::domain_violation, at, "recoil: amount cannot be negative");
        auto& r = self();
        const std::int64_t amount = std::min<std::int64_t>(n, r.hp);
        r.hp -= static_cast<int>(amount);
        emit(EventKind::damage, {{"target", to_string(me())}, {"amount", amount}, {"hp", r.hp}, {"recoil", true}});
        return amount;
      }
      case Builtin::inflict_status: {
        const auto& status = str_arg(args, 0, fn, at);
        if (std::find(kStatuses.begin(), kStatuses.end(), status) == kStatuses.end()) {
          fault(K::domain_violation, at, "inflict_status: unknown status '" + status + "'");
        }
        auto turns = int_arg(args, 1, fn, at);
        if (turns < 1) fault(K::domain_violation, at, "inflict_status: turns must be positive");
        auto& f = foe();
        bool already = false;
        for (auto s : kStatuses) already = already || f.flag(std::string(s)) > 0;
        if (!already) f.flags[status] = turns;
        emit(EventKind::status,
             {{"target", to_string(other(me()))}, {"status", status}, {"turns", turns}, {"applied", !already}});
        return !already;
      }
      case Builtin::set_foe_flag: {
        const auto& flag = str_arg(args, 0, fn, at);
        if (flag.empty()) fault(K::domain_violation, at, "set_foe_flag: empty flag name");
        set_flag(other(me()), flag, int_arg(args, 1, fn, at), at);
        return None{};
      }
      case Builtin::chance: {
        const double p = num_arg(args, 0, fn, at);
        if (p < 0 || p > 100) fault(K::domain_violation, at, "chance: percent must lie in [0, 100]");
        const auto roll = b_.draw(100, "chance", to_string(me()));
        return static_cast<double>(roll) < p;
      }
      case Builtin::has_type: return self().has_type(type_arg(args, 0, fn, at));
      case Builtin::foe_has_type: return foe().has_type(type_arg(args, 0, fn, at));
      case Builtin::min:
      case Builtin::max: {
        num_arg(args, 0, fn, at);
        num_arg(args, 1, fn, at);
        const bool lt = as_double(args[0]) < as_double(args[1]);
        const bool take_first = bi->id == Builtin::min ? lt : !lt;
        if (std::holds_alternative<std::int64_t>(args[0]) && std::holds_alternative<std::int64_t>(args[1])) {
          auto a = std::get<std::int64_t>(args[0]), b = std::get<std::int64_t>(args[1]);
          return bi->id == Builtin::min ? std::min(a, b) : std::max(a, b);
        }
        return take_first ? as_double(args[0]) : as_double(args[1]);
      }
      case Builtin::abs: {
        if (auto* i = std::get_if<std::int64_t>(&args[0])) {
          if (*i == std::numeric_limits<std::int64_t>::min()) fault(K::domain_violation, at, "integer overflow");
          return *i < 0 ? -*i : *i;
        }
        return std::fabs(num_arg(args, 0, fn, at));
      }
      case Builtin::floor: return int_arg(args, 0, fn, at);
    }
    fault(K::unknown_identifier, at, "unknown builtin '" + callee + "'");
  }

  void apply_boost(SideId target, const std::string& stat, std::int64_t n) {
    auto& r = b_.side(target);
    const int before = r.stage(stat);
    const int after = static_cast<int>(std::clamp<std::int64_t>(before + std::clamp<std::int64_t>(n, -12, 12),
                                                                 kMinStage, kMaxStage));
    r.stages[stat] = after;
    emit(EventKind::boost,
         {{"target", to_string(target)}, {"stat", stat}, {"requested", n}, {"change", after - before}, {"stage", after}});
  }

  Value deal_damage(const std::vector<Value>& args, const Span& at) {
    const char* fn = "deal_damage";
    const std::string move = str_arg(args, 0, fn, at);
    const std::int64_t base = int_arg(args, 1, fn, at);
    if (base < 0) fault(K::domain_violation, at, "deal_damage: power cannot be negative");
    const Type type = type_arg(args, 2, fn, at);
    const auto& category = str_arg(args, 3, fn, at);
    if (category != "physical" && category != "special") {
      fault(K::domain_violation, at, "deal_damage: category must be \"physical\" or \"special\"");
    }

    Value hooked = call(me(), "get_power", {move, base}, at);
    if (!is_number(hooked)) fault(K::type_mismatch, at, "get_power returned " + describe(hooked) + ", not a number");
    const double pd = std::floor(as_double(hooked));
    if (pd < 0 || pd > static_cast<double>(kMaxPower)) {
      fault(K::domain_violation, at, "get_power returned a power outside [0, " + std::to_string(kMaxPower) + "]");
    }
    const auto power = static_cast<std::int64_t>(pd);

    const SideId target = other(me());
    auto& attacker = self();
    auto& defender = foe();
    if (defender.flag("protected") > 0) {
      const auto left = defender.flag("protected") - 1;
      if (left == 0) defender.flags.erase("protected");
      else defender.flags["protected"] = left;
      emit(EventKind::damage, {{"target", to_string(target)},
                               {"move", move},
                               {"amount", 0},
                               {"hp", defender.hp},
                               {"blocked", true}});
      return std::int64_t{0};
    }
    const bool physical = category == "physical";
    const Multiplier mult = TypeChart::standard().multiplier(type, defender.types);
    const std::int64_t raw = damage_formula(power, attacker.effective(physical ? "atk" : "spa"),
                                            defender.effective(physical ? "def" : "spd"), attacker.has_type(type), mult,
                                            attacker.level);
    const std::int64_t amount = std::min<std::int64_t>(raw, defender.hp);
    defender.hp -= static_cast<int>(amount);
    emit(EventKind::damage, {{"target", to_string(target)},
                             {"move", move},
                             {"type", std::string(to_string(type))},
                             {"power", power},
                             {"effectiveness", std::to_string(mult.num) + "/" + std::to_string(mult.den)},
                             {"amount", amount},
                             {"hp", defender.hp}});
    return amount;
  }

  BattleState& b_;
  std::vector<Frame> frames_;
  int steps_ = 0;
  int depth_ = 0;

 public:
  SideId origin_ = SideId::A;
};

}  // namespace

void invoke(BattleState& b, SideId actor, const std::string& method) {
  Machine m(b);
  m.origin_ = actor;
  try {
    m.call(actor, method, {}, Span{});
  } catch (Fault& f) {
    const RuntimeError& e = f.error;
    b.log.push_back(Event{b.turn, to_string(e.side), EventKind::runtime_error, e.to_json()});
    b.error = e;
    b.outcome = e.side == SideId::A ? Outcome::error_a : Outcome::error_b;
  }
}

}  // namespace delta::battle
