#pragma once

// YAML scenario files. The schema is strict: every mapping key is checked
// and unknown keys are rejected with their line number.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "avgdrem/simulation.hpp"

namespace avgdrem {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Resolves a scenario argument: an existing file path, or the name of a
/// bundled scenario ("scenario_a" -> <bundled dir>/scenario_a.yaml).
std::filesystem::path resolve_scenario(const std::string& name_or_path);

std::filesystem::path bundled_scenario_dir();

/// Parses and validates. Errors carry "file:line: message".
ScenarioSpec load_scenario(const std::filesystem::path& path);
ScenarioSpec parse_scenario(const std::string& yaml_text, const std::string& origin = "<string>");

enum class LawSelection { gradient, averaging, both };

struct RunConfig {
    std::filesystem::path scenario_path;
    LawSelection law = LawSelection::both;
    std::optional<double> gamma;
    std::optional<double> l;
    std::optional<double> mu;
    std::optional<double> k;  // applied to every channel
    std::optional<double> step;
    std::optional<double> horizon;
    std::optional<double> sample_every;
    std::filesystem::path out_dir = "out";
};

LawSelection parse_law_selection(const std::string& s);

/// Applies the overrides of cfg to spec and re-validates. gamma applies to
/// every selected law; l and mu only to the matching extension scheme.
void apply_overrides(ScenarioSpec& spec, const RunConfig& cfg);

/// Loads cfg.scenario_path and applies the overrides.
ScenarioSpec load_config(const RunConfig& cfg);

}  // namespace avgdrem
