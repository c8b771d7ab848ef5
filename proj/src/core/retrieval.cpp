#include "delta/core/retrieval.hpp"

#include <algorithm>
#include <cctype>

#include "delta/dsl/printer.hpp"
#include "delta/error.hpp"

namespace delta::core {

namespace {

std::string render_methods(const std::vector<const dsl::MethodDef*>& methods) {
  std::string out;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (i) out += '\n';
    out += dsl::print_method(*methods[i]);
  }
  return out;
}

}  // namespace

std::vector<std::string> Skeleton::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries) out.push_back(e.name);
  return out;
}

std::string Skeleton::render() const {
  std::string out = "role " + role_name + " {\n";
  for (const auto& f : fields) out += "  let " + f + "\n";
  for (const auto& e : entries) {
    out += "  fn " + e.name + "(";
    for (std::size_t i = 0; i < e.params.size(); ++i) {
      if (i) out += ", ";
      out += e.params[i];
    }
    out += ")\n";
  }
  out += "}\n";
  return out;
}

std::string RetrievedContext::render() const {
  std::vector<const dsl::MethodDef*> ptrs;
  for (const auto& e : entries) ptrs.push_back(&e);
  return render_methods(ptrs);
}

Skeleton skeleton(const EngineState& state) {
  Skeleton sk;
  sk.role_name = state.role().name;
  for (const auto& f : state.role().fields) sk.fields.push_back(f.name);
  for (const auto* m : state.resolved_methods()) sk.entries.push_back({m->name, m->params});
  return sk;
}

RetrievedContext retrieve(const EngineState& state, const std::vector<std::string>& names) {
  if (names.empty()) throw Error("retrieve: no entries requested");
  RetrievedContext ctx;
  ctx.role_name = state.role().name;
  ctx.source_step = state.step();
  std::vector<std::string> missing;
  std::vector<std::string> seen;
  for (const auto& n : names) {
    if (std::find(seen.begin(), seen.end(), n) != seen.end()) continue;
    seen.push_back(n);
    if (const auto* m = state.lookup(n)) {
      ctx.entries.push_back(*m);
    } else {
      missing.push_back(n);
    }
  }
  if (!missing.empty()) throw UnknownEntry(std::move(missing));
  return ctx;
}

std::string full_listing(const EngineState& state) { return render_methods(state.resolved_methods()); }

std::string print_state(const EngineState& state) { return dsl::print(state.full_program()); }

std::size_t token_count(std::string_view text) {
  std::size_t n = 0;
  bool in_token = false;
  for (unsigned char c : text) {
    const bool ws = std::isspace(c) != 0;
    if (!ws && !in_token) ++n;
    in_token = !ws;
  }
  return n;
}

}  // namespace delta::core
