#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace approxnfa {

/// Multiset of packets (L4 payload byte strings) with occurrence counts.
class TrafficSample {
public:
    using Entries = std::map<std::string, std::uint64_t, std::less<>>;

    /// Adds `count` occurrences; a zero count is a no-op.
    void add(std::string_view packet, std::uint64_t count = 1);
    /// Multiset sum.
    void merge(const TrafficSample& other);

    std::uint64_t count(std::string_view packet) const;
    /// |S|, the number of packet occurrences.
    std::uint64_t total_packets() const noexcept { return total_packets_; }
    /// Sum of |w| * S(w).
    std::uint64_t total_bytes() const noexcept { return total_bytes_; }
    std::size_t distinct() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return total_packets_ == 0; }
    const Entries& entries() const noexcept { return entries_; }

    friend bool operator==(const TrafficSample&, const TrafficSample&) = default;

private:
    Entries entries_;
    std::uint64_t total_packets_ = 0;
    std::uint64_t total_bytes_ = 0;
};

struct PcapOptions {
    std::optional<std::uint64_t> max_packets;   ///< stop after this many payloads were collected
    std::optional<std::size_t> truncate_length; ///< keep only the first N payload bytes
};

struct PcapStats {
    std::uint64_t frames = 0;   ///< records read
    std::uint64_t packets = 0;  ///< payloads added to the sample
    std::uint64_t skipped = 0;  ///< frames without a parseable TCP/UDP payload
};

struct PcapResult {
    TrafficSample sample;
    PcapStats stats;
};

/// Ethernet (optionally one 802.1Q tag) -> IPv4/IPv6 -> TCP/UDP payload.
/// Returns nullopt when the frame carries no parseable L4 payload.
/// Non-first IPv4 fragments and IPv6 fragments are rejected.
std::optional<std::string_view> extract_l4_payload(std::string_view frame);

/// Classic libpcap capture (either byte order, micro- or nanosecond magic),
/// Ethernet link type only. Per-frame parse failures are tallied in stats.
PcapResult parse_pcap(std::string_view file_bytes, const PcapOptions& options = {});
PcapResult read_pcap(const std::filesystem::path& path, const PcapOptions& options = {});

/// Raw record format: a 4-byte little-endian length N followed by N payload bytes.
TrafficSample parse_raw(std::string_view file_bytes);
std::string encode_raw(const TrafficSample& sample);
TrafficSample read_raw(const std::filesystem::path& path);
void write_raw(const TrafficSample& sample, const std::filesystem::path& path);

/// Reads a pcap file if the magic matches, otherwise the raw record format.
TrafficSample load_trace(const std::filesystem::path& path, const PcapOptions& options = {});

std::string read_file_bytes(const std::filesystem::path& path);

} // namespace approxnfa
