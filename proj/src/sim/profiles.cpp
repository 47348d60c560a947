#include "fogledger/sim/profiles.hpp"

#include <algorithm>
#include <stdexcept>

namespace fogledger::sim {

namespace {
void require_positive(double v, const std::string& owner, const char* field) {
    if (!(v > 0)) throw std::invalid_argument(owner + ": '" + field + "' must be positive");
}
}  // namespace

void DeviceProfile::validate() const {
    require_positive(mips, name, "mips");
    require_positive(downlink_mb, name, "downlink_mb");
    require_positive(uplink_mb, name, "uplink_mb");
    require_positive(memory_gb, name, "memory_gb");
    require_positive(busy_power, name, "busy_power");
    require_positive(idle_power, name, "idle_power");
    if (busy_power < idle_power) throw std::invalid_argument(name + ": 'busy_power' must be at least 'idle_power'");
}

void AppModuleSpec::validate() const {
    require_positive(program_size_mb, name, "program_size_mb");
    require_positive(packet_size_kb, name, "packet_size_kb");
    require_positive(ram_gb, name, "ram_gb");
    if (instructions < 0) throw std::invalid_argument(name + ": 'instructions' must not be negative");
}

LinkProfile make_link(const std::string& from, const DeviceProfile& sender, const std::string& to,
                      const DeviceProfile& receiver, double latency_ms) {
    return LinkProfile{from, to, latency_ms, std::min(sender.uplink_mb, receiver.downlink_mb)};
}

double serialization_ms(double bytes, const LinkProfile& link) { return bytes / (link.bandwidth_mb * 1e6) * 1000.0; }

double transfer_time_ms(double bytes, const LinkProfile& link) { return link.latency_ms + serialization_ms(bytes, link); }

double compute_time_ms(double instructions, const DeviceProfile& profile) {
    return instructions / (profile.mips * 1000.0);
}

double energy(const DeviceProfile& profile, double busy_ms, double idle_ms) {
    return (profile.busy_power * busy_ms + profile.idle_power * idle_ms) / 1000.0;
}

}  // namespace fogledger::sim
