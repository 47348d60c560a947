#include "fogledger/access/alerts.hpp"

namespace fogledger::access {

std::optional<Comparator> parse_comparator(std::string_view text) {
    if (text == ">") return Comparator::Greater;
    if (text == ">=") return Comparator::GreaterEqual;
    if (text == "<") return Comparator::Less;
    if (text == "<=") return Comparator::LessEqual;
    return std::nullopt;
}

namespace {
bool holds(Comparator c, double value, double threshold) {
    switch (c) {
        case Comparator::Greater: return value > threshold;
        case Comparator::GreaterEqual: return value >= threshold;
        case Comparator::Less: return value < threshold;
        case Comparator::LessEqual: return value <= threshold;
    }
    return false;
}
}  // namespace

std::vector<AlertEvent> AlertEngine::evaluate(const std::string& source, const std::string& metric, double value,
                                              std::int64_t now) const {
    std::vector<AlertEvent> out;
    for (const auto& r : rules_) {
        if (r.metric != metric || (r.source && *r.source != source)) continue;
        if (holds(r.comparator, value, r.threshold)) out.push_back({r.rule_id, source, metric, value, now, r.notify});
    }
    return out;
}

}  // namespace fogledger::access
