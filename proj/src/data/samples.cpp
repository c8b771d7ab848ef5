#include "delta/data/samples.hpp"

#include "delta/core/retrieval.hpp"
#include "delta/dsl/parser.hpp"
#include "delta/dsl/printer.hpp"
#include "delta/error.hpp"

namespace delta::data {

using nlohmann::json;

json TrainingSample::to_json() const {
  return {{"roleId", role_id},     {"step", step},
          {"instruction", instruction}, {"context", context},
          {"delta", delta_source},  {"fullCodeAfter", full_code_after},
          {"toi", toi.to_string()}, {"source", source}};
}

TrainingSample TrainingSample::from_json(const json& j) {
  TrainingSample s;
  s.role_id = j.at("roleId").get<std::string>();
  s.step = j.at("step").get<std::size_t>();
  s.instruction = j.at("instruction").get<std::string>();
  s.context = j.at("context").get<std::string>();
  s.delta_source = j.at("delta").get<std::string>();
  s.full_code_after = j.at("fullCodeAfter").get<std::string>();
  const auto bits = j.at("toi").get<std::string>();
  if (bits.size() != kTagCount) throw Error("sample: toi must have " + std::to_string(kTagCount) + " bits");
  for (std::size_t i = 0; i < kTagCount; ++i) s.toi.bits[i] = bits[i] == '1';
  s.source = j.at("source").get<std::string>();
  return s;
}

std::vector<TrainingSample> split_samples(const RoleBundle& role) {
  const auto& history = role.state.history();
  if (history.empty()) throw Error("split: role '" + role.id + "' has no history");
  std::vector<TrainingSample> out;
  core::EngineState before(role.state.initial_role());
  for (std::size_t t = 0; t < history.size(); ++t) {
    const auto& h = history[t];
    std::vector<std::string> names = h.selected;
    if (names.empty()) {
      for (const auto& m : h.delta.methods) {
        if (before.lookup(m.name)) names.push_back(m.name);
      }
    }
    TrainingSample s;
    s.role_id = role.id;
    s.step = t + 1;
    s.instruction = h.instruction.text;
    if (!names.empty()) s.context = core::retrieve(before, names).render();
    s.delta_source = dsl::print(h.delta);
    core::EngineState after = core::merge(h.delta, before, h.instruction, h.selected);
    s.full_code_after = dsl::print(after.role());
    const auto check = core::merge(dsl::parse_delta(s.delta_source), before, h.instruction, h.selected);
    if (dsl::print(check.role()) != s.full_code_after) {
      throw Error("split: step " + std::to_string(t + 1) + " of '" + role.id + "' does not reproduce");
    }
    s.toi = tag_interest(after);
    s.source = core::to_string(role.script.provenance);
    out.push_back(std::move(s));
    before = std::move(after);
  }
  if (dsl::print(before.role()) != dsl::print(role.state.role())) {
    throw Error("split: folding the samples of '" + role.id + "' does not give its final code");
  }
  return out;
}

std::vector<TrainingSample> split_all(const std::vector<RoleBundle>& roles) {
  std::vector<TrainingSample> out;
  for (const auto& r : roles) {
    auto s = split_samples(r);
    out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  return out;
}

std::string to_jsonl(const std::vector<TrainingSample>& samples) {
  std::string out;
  for (const auto& s : samples) out += s.to_json().dump() + "\n";
  return out;
}

}  // namespace delta::data
