#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fogledger/common/identity.hpp"

namespace fogledger::access {

enum class Comparator { Greater, GreaterEqual, Less, LessEqual };
std::optional<Comparator> parse_comparator(std::string_view text);

struct AlertRule {
    std::string rule_id;
    std::string metric;
    Comparator comparator = Comparator::Greater;
    double threshold = 0.0;
    std::vector<NodeAddress> notify;
    std::optional<std::string> source;  // restrict to one device when set
};

struct AlertEvent {
    std::string rule_id;
    std::string source;
    std::string metric;
    double value = 0.0;
    std::int64_t timestamp = 0;
    std::vector<NodeAddress> notify;
};

class AlertEngine {
public:
    void add_rule(AlertRule rule) { rules_.push_back(std::move(rule)); }
    std::size_t rule_count() const { return rules_.size(); }
    std::vector<AlertEvent> evaluate(const std::string& source, const std::string& metric, double value,
                                     std::int64_t now) const;

private:
    std::vector<AlertRule> rules_;
};

}  // namespace fogledger::access
