#include "approxnfa/traffic.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "approxnfa/error.hpp"

namespace approxnfa {

void TrafficSample::add(std::string_view packet, std::uint64_t count) {
    if (count == 0) return;
    auto it = entries_.find(packet);
    if (it == entries_.end()) it = entries_.emplace(std::string(packet), 0).first;
    it->second += count;
    total_packets_ += count;
    total_bytes_ += count * packet.size();
}

void TrafficSample::merge(const TrafficSample& other) {
    for (const auto& [w, c] : other.entries_) add(w, c);
}

std::uint64_t TrafficSample::count(std::string_view packet) const {
    auto it = entries_.find(packet);
    return it == entries_.end() ? 0 : it->second;
}

namespace {

std::uint16_t be16(std::string_view b, std::size_t off) {
    return static_cast<std::uint16_t>((static_cast<std::uint8_t>(b[off]) << 8) | static_cast<std::uint8_t>(b[off + 1]));
}

std::uint32_t load32(std::string_view b, std::size_t off, bool swap) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        std::uint32_t byte = static_cast<std::uint8_t>(b[off + i]);
        v |= swap ? byte << (8 * (3 - i)) : byte << (8 * i);
    }
    return v;
}

constexpr std::uint16_t kEtherIpv4 = 0x0800;
constexpr std::uint16_t kEtherIpv6 = 0x86dd;
constexpr std::uint16_t kEtherVlan = 0x8100;
constexpr std::uint8_t kProtoTcp = 6;
constexpr std::uint8_t kProtoUdp = 17;

std::optional<std::string_view> l4_payload(std::uint8_t proto, std::string_view seg) {
    if (proto == kProtoUdp) {
        if (seg.size() < 8) return std::nullopt;
        std::size_t len = be16(seg, 4);
        if (len < 8) return std::nullopt;
        return seg.substr(8, std::min(len, seg.size()) - 8);
    }
    if (proto == kProtoTcp) {
        if (seg.size() < 20) return std::nullopt;
        std::size_t off = static_cast<std::size_t>(static_cast<std::uint8_t>(seg[12]) >> 4) * 4;
        if (off < 20 || off > seg.size()) return std::nullopt;
        return seg.substr(off);
    }
    return std::nullopt;
}

std::optional<std::string_view> ipv4_payload(std::string_view ip) {
    if (ip.size() < 20 || (static_cast<std::uint8_t>(ip[0]) >> 4) != 4) return std::nullopt;
    std::size_t ihl = static_cast<std::size_t>(static_cast<std::uint8_t>(ip[0]) & 0x0f) * 4;
    std::size_t total = be16(ip, 2);
    if (ihl < 20 || total < ihl || ip.size() < ihl) return std::nullopt;
    std::uint16_t frag = be16(ip, 6);
    bool more_fragments = frag & 0x2000;
    if ((frag & 0x1fff) != 0 || more_fragments) return std::nullopt;
    // Captures may be snapped short of the declared length, and Ethernet may pad past it.
    ip = ip.substr(0, std::min(total, ip.size()));
    return l4_payload(static_cast<std::uint8_t>(ip[9]), ip.substr(ihl));
}

std::optional<std::string_view> ipv6_payload(std::string_view ip) {
    if (ip.size() < 40 || (static_cast<std::uint8_t>(ip[0]) >> 4) != 6) return std::nullopt;
    std::size_t payload_len = be16(ip, 4);
    std::uint8_t next = static_cast<std::uint8_t>(ip[6]);
    std::string_view rest = ip.substr(40, std::min(payload_len, ip.size() - 40));
    // Hop-by-hop, routing and destination options headers; fragments are not reassembled.
    while (next == 0 || next == 43 || next == 60) {
        if (rest.size() < 8) return std::nullopt;
        std::size_t len = (static_cast<std::size_t>(static_cast<std::uint8_t>(rest[1])) + 1) * 8;
        if (len > rest.size()) return std::nullopt;
        next = static_cast<std::uint8_t>(rest[0]);
        rest = rest.substr(len);
    }
    return l4_payload(next, rest);
}

} // namespace

std::optional<std::string_view> extract_l4_payload(std::string_view frame) {
    if (frame.size() < 14) return std::nullopt;
    std::uint16_t type = be16(frame, 12);
    std::size_t off = 14;
    if (type == kEtherVlan) {
        if (frame.size() < 18) return std::nullopt;
        type = be16(frame, 16);
        off = 18;
    }
    if (type == kEtherIpv4) return ipv4_payload(frame.substr(off));
    if (type == kEtherIpv6) return ipv6_payload(frame.substr(off));
    return std::nullopt;
}

PcapResult parse_pcap(std::string_view data, const PcapOptions& options) {
    if (data.size() < 24) throw InputError("pcap: truncated global header");
    bool swap = false;
    std::uint32_t magic = load32(data, 0, false);
    if (magic == 0xa1b2c3d4u || magic == 0xa1b23c4du) {
        swap = false;
    } else if (magic == 0xd4c3b2a1u || magic == 0x4d3cb2a1u) {
        swap = true;
    } else {
        std::ostringstream os;
        os << "pcap: bad magic 0x" << std::hex << magic;
        throw InputError(os.str());
    }
    std::uint32_t linktype = load32(data, 20, swap);
    if (linktype != 1) throw InputError("pcap: unsupported link type " + std::to_string(linktype) + " (Ethernet only)");

    PcapResult result;
    std::size_t off = 24;
    while (off < data.size()) {
        if (options.max_packets && result.stats.packets >= *options.max_packets) break;
        if (data.size() - off < 16) throw InputError("pcap: truncated record header at offset " + std::to_string(off));
        std::uint32_t incl = load32(data, off + 8, swap);
        off += 16;
        if (data.size() - off < incl) throw InputError("pcap: truncated record at offset " + std::to_string(off - 16));
        std::string_view frame = data.substr(off, incl);
        off += incl;
        ++result.stats.frames;
        auto payload = extract_l4_payload(frame);
        if (!payload) {
            ++result.stats.skipped;
            continue;
        }
        std::string_view w = *payload;
        if (options.truncate_length) w = w.substr(0, std::min(w.size(), *options.truncate_length));
        result.sample.add(w);
        ++result.stats.packets;
    }
    return result;
}

std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

PcapResult read_pcap(const std::filesystem::path& path, const PcapOptions& options) {
    return parse_pcap(read_file_bytes(path), options);
}

TrafficSample parse_raw(std::string_view data) {
    TrafficSample sample;
    std::size_t off = 0;
    while (off < data.size()) {
        if (data.size() - off < 4) throw InputError("raw trace: truncated length at byte offset " + std::to_string(off));
        std::uint32_t n = load32(data, off, false);
        if (data.size() - off - 4 < n)
            throw InputError("raw trace: truncated record at byte offset " + std::to_string(off));
        sample.add(data.substr(off + 4, n));
        off += 4 + static_cast<std::size_t>(n);
    }
    return sample;
}

std::string encode_raw(const TrafficSample& sample) {
    std::string out;
    out.reserve(sample.total_bytes() + 4 * sample.total_packets());
    for (const auto& [w, c] : sample.entries()) {
        if (w.size() > 0xffffffffu) throw ParameterError("packet too long for the raw format");
        auto n = static_cast<std::uint32_t>(w.size());
        for (std::uint64_t i = 0; i < c; ++i) {
            for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((n >> (8 * k)) & 0xff));
            out += w;
        }
    }
    return out;
}

TrafficSample read_raw(const std::filesystem::path& path) { return parse_raw(read_file_bytes(path)); }

void write_raw(const TrafficSample& sample, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    auto bytes = encode_raw(sample);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("write failed for " + path.string());
}

TrafficSample load_trace(const std::filesystem::path& path, const PcapOptions& options) {
    auto bytes = read_file_bytes(path);
    if (bytes.size() >= 4) {
        std::uint32_t magic = load32(bytes, 0, false);
        if (magic == 0xa1b2c3d4u || magic == 0xa1b23c4du || magic == 0xd4c3b2a1u || magic == 0x4d3cb2a1u)
            return parse_pcap(bytes, options).sample;
    }
    return parse_raw(bytes);
}

} // namespace approxnfa
