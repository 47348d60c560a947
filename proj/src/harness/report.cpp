#include "fogledger/harness/report.hpp"

#include <sstream>

namespace fogledger::harness {

const std::vector<std::string>& primary_modules() {
    static const std::vector<std::string> names = {"chain-core", "crypto-suite", "consensus",  "nodes",
                                                   "access-control", "simnet",   "cli-harness"};
    return names;
}

std::vector<std::string> RunReport::uncovered() const {
    std::vector<std::string> out;
    for (const auto& m : primary_modules()) {
        auto it = coverage.find(m);
        if (it == coverage.end() || it->second == 0) out.push_back(m);
    }
    return out;
}

bool RunReport::passed() const {
    for (const auto& e : expectations)
        if (!e.pass) return false;
    return uncovered().empty();
}

std::vector<ExpectationResult> evaluate(const std::vector<sim::Expectation>& expectations, const sim::CsvTable& table) {
    std::vector<ExpectationResult> out;
    for (const auto& x : expectations) {
        ExpectationResult r{x.metric, std::nullopt, x.min, x.max, x.where, false};
        for (const auto& [name, value] : table.summaries())
            if (name == x.metric) r.value = value;
        if (r.value) r.pass = (!x.min || *r.value >= *x.min) && (!x.max || *r.value <= *x.max);
        out.push_back(std::move(r));
    }
    return out;
}

std::string render(const RunReport& report, const sim::CsvTable& table) {
    std::ostringstream os;
    os << "preset    " << report.preset << "\n"
       << "scenario  " << report.scenario << "\n"
       << "seed      " << report.seed << "\n"
       << "metrics   " << report.metrics_path << "\n\n";
    std::size_t width = 0;
    for (const auto& [name, v] : table.summaries()) width = std::max(width, name.size());
    for (const auto& [name, v] : table.summaries())
        os << "  " << name << std::string(width - name.size() + 2, ' ') << sim::fmt(v) << "\n";

    os << "\nexpectations\n";
    if (report.expectations.empty()) os << "  (none declared)\n";
    for (const auto& e : report.expectations) {
        os << "  " << (e.pass ? "PASS " : "FAIL ") << e.metric << " = " << (e.value ? sim::fmt(*e.value) : "missing");
        if (e.min) os << "  min " << sim::fmt(*e.min);
        if (e.max) os << "  max " << sim::fmt(*e.max);
        os << "  (" << e.where << ")\n";
    }
    os << "\ncoverage\n";
    for (const auto& m : primary_modules()) {
        auto it = report.coverage.find(m);
        os << "  " << m << " " << (it == report.coverage.end() ? 0 : it->second) << "\n";
    }
    for (const auto& m : report.uncovered()) os << "  FAIL module not exercised: " << m << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", report.runtime_s);
    os << "\nruntime   " << buf << " s\n"
       << "result    " << (report.passed() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

}  // namespace fogledger::harness
