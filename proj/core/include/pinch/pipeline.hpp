#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pinch/amalgam.hpp"
#include "pinch/generic.hpp"

namespace pinch {

/// Rejected configuration (exit code 2).
class ConfigError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

struct FactorBudgets {
  int powers = 0;
  int witness_length = 0;  // every reduced word up to this length outside <c>
  int witness_copies = 1;
  int orbit_sizes = 0;
  int copies = 0;
  int intervals = 0;
};

struct PipelineConfig {
  int rank_g = 1;
  int rank_h = 1;
  std::string c;  // over a1.., b
  std::string d;  // over x1.., b
  FactorBudgets budgets;
  int amalgam_words = 0;  // sampled words to force
  int amalgam_pairs = 2;  // syllable pairs per word, at most
  int syllable_length = 3;
  std::uint64_t seed = 1;
  std::vector<int> folner_match;  // k with sigma(A_k) = B_k
  int balance_rounds = 64;
  std::int64_t margin = 64;
};

inline const Alphabet kAlphabetG{"a", "b"};
inline const Alphabet kAlphabetH{"x", "b"};

/// Parses and checks the words: cyclically reduced, some alpha present,
/// beta-exponent sum zero, ranks respected.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& config);
void validate_config(const PipelineConfig& config);

/// Genus g >= 2: c = [a1,a2]...[a_{2g-3}, b], d = [x1, b]^{-1}.
PipelineConfig surface_preset(int genus);

struct ForcedWitness {
  AmalgamWord word;
  ForceResult result;
};

struct Check {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct PipelineResult {
  PipelineConfig config;
  std::optional<GenericBuilder> g;
  std::optional<GenericBuilder> h;
  SigmaState sigma;
  std::vector<ForcedWitness> forced;
  int balance_rounds_used = 0;
  std::vector<Check> checks;
  bool ok() const;
};

/// The amalgam words a config asks to force, in a fixed order.
std::vector<AmalgamWord> sample_amalgam_words(const PipelineConfig& config);

/// Builds G, H and sigma, forces the sampled words and runs every check.
/// Throws ConfigError on a bad config and PreconditionError when the budgets
/// cannot be met.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Recomputes every check from the stored parts.
std::vector<Check> verify(const PipelineResult& r);

// Files: config.json, g_action.json, h_action.json, sigma.json, report.json.
void write_outputs(const PipelineResult& r, const std::filesystem::path& dir);
PipelineResult load_outputs(const std::filesystem::path& dir);

nlohmann::json factor_snapshot(const GenericBuilder& b, const Alphabet& alphabet);
GenericBuilder factor_from_snapshot(const nlohmann::json& j, const Alphabet& alphabet);
nlohmann::json pipeline_report(const PipelineResult& r);

/// Schreier graph of the closed action on the support window.
std::string export_dot(const ActionState& state, bool explicit_beta, const Alphabet& alphabet = {});
nlohmann::json export_json(const ActionState& state, bool explicit_beta, const Alphabet& alphabet = {});

FactorPair factor_pair(const PipelineResult& r, const ClosedAction& ga, const ClosedAction& ha);

nlohmann::json read_json_file(const std::filesystem::path& p);
void write_json_file(const std::filesystem::path& p, const nlohmann::json& j);

}  // namespace pinch
