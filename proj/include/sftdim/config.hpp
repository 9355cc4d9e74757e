#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sftdim/markov.hpp"

namespace sftdim {

// A full model as shipped in JSON configs: shift, roof function, expansion
// functions, and optionally an explicit Markov matrix. Tables are keyed by
// comma-joined symbol names ("1,2" for the pair (1,2)) and must cover exactly
// the admissible words of the stated depth.
struct Model {
  Sft sft;
  LocallyConstantFn roof;
  LocallyConstantFn fu;
  LocallyConstantFn fs;
  bool fs_defaulted = true;  // fs block absent, copied from fu
  std::optional<MarkovMeasure> markov;
  std::string digest;  // SHA-256 of the canonical document
};

// Strict load: throws Error(Schema/...) on the first problem.
Model load_model(const nlohmann::json& doc);
Model load_model_file(const std::string& path);

// Non-throwing sweep used by `check`: collects every detectable problem.
struct ConfigIssue {
  std::string code;
  std::string detail;
};
std::vector<ConfigIssue> collect_config_issues(const nlohmann::json& doc);

// Canonical serialization (sorted keys, no whitespace) and its SHA-256.
std::string canonical_dump(const nlohmann::json& doc);
std::string config_digest(const nlohmann::json& doc);

// Round-trips a model back to a config document; `markov` overrides or adds
// the Markov block (used by solve --out).
nlohmann::json model_to_json(const Model& model);
nlohmann::json model_to_json(const Model& model, const MarkovMeasure& markov);

// The l-block recoded document: new alphabet (names joined with '.'),
// overlap adjacency, recoded tables, and the induced Markov block when the
// input carries one.
nlohmann::json recode_config(const Model& model, int ell);

}  // namespace sftdim
