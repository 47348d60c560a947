#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>

#include "fogledger/harness/adversarial.hpp"

namespace fogledger::harness {

class UnknownPreset : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

const std::vector<std::string>& preset_names();
bool is_preset(const std::string& name);
// Scenario file a preset uses when none is given.
std::string default_scenario_file(const std::string& preset);

struct PresetResult {
    sim::CsvTable table;
    Coverage coverage;
};

// Throws UnknownPreset for names outside preset_names().
PresetResult run_preset(const std::string& name, const sim::Scenario& scenario, std::uint64_t seed,
                        const std::optional<std::filesystem::path>& out_dir = std::nullopt);

}  // namespace fogledger::harness
