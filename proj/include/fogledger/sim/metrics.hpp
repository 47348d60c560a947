#pragma once

#include <map>
#include <string>
#include <vector>

namespace fogledger::sim {

struct HostStats {
    std::string host;
    std::string tier;
    double busy_ms = 0;
    double idle_ms = 0;
    double busy_power = 0;
    double idle_power = 0;
    double energy = 0;
};

struct RetrievalSample {
    double size_kb = 0;
    double delay_ms = 0;
    bool local = false;   // requested a transaction of the requester's own cluster
    bool served_locally = false;
    bool ok = false;
};

struct TxTally {
    std::uint64_t created = 0;
    std::uint64_t committed = 0;
    std::uint64_t in_flight = 0;
    std::uint64_t pooled = 0;
    std::uint64_t dropped = 0;

    bool conserved() const { return created == committed + in_flight + pooled + dropped; }
};

struct Metrics {
    std::string placement;
    std::uint64_t seed = 0;
    double duration_ms = 0;

    std::vector<double> loop_delays_ms;
    std::vector<HostStats> hosts;
    std::vector<RetrievalSample> retrievals;
    std::vector<double> consensus_delays_ms;  // proposal to commit at the proposer
    std::vector<double> commit_delays_ms;     // gateway flush to committed block back at the gateway

    std::uint64_t messages = 0;
    std::uint64_t bytes = 0;
    std::uint64_t blocks_committed = 0;
    std::uint64_t alerts = 0;
    std::uint64_t tamper_alarms = 0;
    std::uint64_t missing_block_reports = 0;
    std::uint64_t pruned_blocks = 0;
    std::uint64_t samples_rejected = 0;
    std::uint64_t events = 0;
    TxTally tx;
    std::map<std::string, std::uint64_t> coverage;

    double tier_energy(const std::vector<std::string>& tiers) const;
};

double mean(const std::vector<double>& v);
double min_of(const std::vector<double>& v);
double max_of(const std::vector<double>& v);

// Percentage by which `better` undercuts `baseline`.
double reduction_pct(double baseline, double better);

// Fixed-precision text used for every number written to CSV, so identical
// runs give identical bytes.
std::string fmt(double v);

/// Rows of (metric, entity, value) with a trailing summary block of aggregate
/// values. Rows keep insertion order.
class CsvTable {
public:
    void row(const std::string& metric, const std::string& entity, double value);
    void summary(const std::string& metric, double value);
    const std::vector<std::pair<std::string, double>>& summaries() const { return summary_; }
    std::string str() const;

private:
    std::vector<std::string> rows_;
    std::vector<std::pair<std::string, double>> summary_;
};

}  // namespace fogledger::sim
