#include "fogledger/sim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace fogledger::sim {

double Metrics::tier_energy(const std::vector<std::string>& tiers) const {
    double e = 0;
    for (const auto& h : hosts)
        if (std::find(tiers.begin(), tiers.end(), h.tier) != tiers.end()) e += h.energy;
    return e;
}

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}
double min_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end()); }
double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

double reduction_pct(double baseline, double better) {
    return baseline > 0 ? 100.0 * (baseline - better) / baseline : 0.0;
}

std::string fmt(double v) {
    if (v == 0) v = 0;  // folds -0 into 0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void CsvTable::row(const std::string& metric, const std::string& entity, double value) {
    rows_.push_back(metric + "," + entity + "," + fmt(value));
}

void CsvTable::summary(const std::string& metric, double value) { summary_.emplace_back(metric, value); }

std::string CsvTable::str() const {
    std::string out = "metric,entity,value\n";
    for (const auto& r : rows_) out += r + "\n";
    out += "\n# summary\nmetric,value\n";
    for (const auto& [m, v] : summary_) out += m + "," + fmt(v) + "\n";
    return out;
}

}  // namespace fogledger::sim
