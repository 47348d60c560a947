#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fogledger/sim/metrics.hpp"
#include "fogledger/sim/scenario.hpp"

namespace fogledger::harness {

// Modules every preset run is expected to touch.
const std::vector<std::string>& primary_modules();

struct ExpectationResult {
    std::string metric;
    std::optional<double> value;  // empty when the run did not produce the metric
    std::optional<double> min;
    std::optional<double> max;
    std::string where;
    bool pass = false;
};

struct RunReport {
    std::string preset;
    std::string scenario;
    std::uint64_t seed = 0;
    std::string metrics_path;
    std::string summary_path;
    std::vector<ExpectationResult> expectations;
    std::map<std::string, std::uint64_t> coverage;
    double runtime_s = 0;

    std::vector<std::string> uncovered() const;
    bool passed() const;
};

// Checks each expectation against the table's summary values.
std::vector<ExpectationResult> evaluate(const std::vector<sim::Expectation>& expectations, const sim::CsvTable& table);

// Plain-text summary: summary values, expectation verdicts, coverage, runtime.
std::string render(const RunReport& report, const sim::CsvTable& table);

}  // namespace fogledger::harness
