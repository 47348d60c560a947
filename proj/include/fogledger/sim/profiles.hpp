#pragma once

#include <string>

namespace fogledger::sim {

// Bandwidths are megabytes per second (1 MB = 1e6 bytes); powers are energy
// units per second of busy or idle time.
struct DeviceProfile {
    std::string name;
    double mips = 0;
    double downlink_mb = 0;
    double uplink_mb = 0;
    double memory_gb = 0;
    double busy_power = 0;
    double idle_power = 0;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct AppModuleSpec {
    std::string name;
    double program_size_mb = 0;
    double packet_size_kb = 0;
    double ram_gb = 0;
    double instructions = 0;  // per invocation; zero for modules off every measured path

    void validate() const;
    double packet_bytes() const { return packet_size_kb * 1000.0; }
};

// One direction of a link. The usable bandwidth is the sender's uplink or the
// receiver's downlink, whichever is smaller.
struct LinkProfile {
    std::string from;
    std::string to;
    double latency_ms = 0;
    double bandwidth_mb = 0;
};

LinkProfile make_link(const std::string& from, const DeviceProfile& sender, const std::string& to,
                      const DeviceProfile& receiver, double latency_ms);

// Serialization time on the wire, without the latency term.
double serialization_ms(double bytes, const LinkProfile& link);
double transfer_time_ms(double bytes, const LinkProfile& link);
double compute_time_ms(double instructions, const DeviceProfile& profile);

double energy(const DeviceProfile& profile, double busy_ms, double idle_ms);

}  // namespace fogledger::sim
