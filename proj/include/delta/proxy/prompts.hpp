#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "delta/proxy/neural_proxy.hpp"

namespace delta::proxy {

// Bumped whenever any template text below changes.
inline constexpr std::string_view kTemplateVersion = "two-step/1";

inline constexpr double kSelectTemperature = 0.0;
inline constexpr double kGenerateTemperature = 0.2;

// Phase A prompt: the skeleton with every signature plus the instruction;
// asks for nothing but method names, one per line.
PromptBundle build_entry_prompt(const core::Skeleton& skeleton, const core::Instruction& x);

// Phase B prompt: retrieved bodies, a grammar cheat-sheet and the
// instruction; asks for exactly one fenced `increment` program.
PromptBundle build_delta_prompt(const core::RetrievedContext& context, const core::Instruction& x);

// Content of the first fenced code block, or the whole trimmed response when
// there is no fence. Throws EmptyResponse for blank input.
std::string extract_delta(std::string_view response);

// Method names from a phase-A answer: one per line, bullets, backticks and
// trailing "()" tolerated; lines that are not identifiers are skipped.
std::vector<std::string> parse_entry_names(std::string_view response);

// Short reference of the role language embedded in generation prompts.
std::string_view grammar_cheat_sheet();

}  // namespace delta::proxy
