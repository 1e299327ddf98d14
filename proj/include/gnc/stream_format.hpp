#pragma once

// Packet stream container. Little-endian throughout:
//   magic "GNC1" | u8 version=1 | u8 m | u16 g | u32 n | u32 K |
//   u32 payload_len | u64 seed | records...
// Each record is a u32 byte length followed by the packet encoding from
// srlnc.hpp (u32 generation, bit-packed coefficients, bit-packed payload).
// The seed lets a decoder rebuild the outer code and pre-code graph; the
// remaining code parameters travel out of band in the run configuration.

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "gnc/srlnc.hpp"

namespace gnc {

struct MalformedStream : std::runtime_error {
  explicit MalformedStream(const std::string& what) : std::runtime_error(what) {}
};

struct StreamHeader {
  std::uint8_t version = 1;
  std::uint8_t m = 1;
  std::uint16_t g = 0;
  std::uint32_t n = 0;
  std::uint32_t K = 0;
  std::uint32_t payload_len = 0;
  std::uint64_t seed = 0;
};

namespace detail {
inline void put_bytes(std::ostream& os, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline std::uint64_t get_bytes(std::istream& is, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = is.get();
    if (c == std::istream::traits_type::eof()) throw MalformedStream("truncated stream header");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}
}  // namespace detail

class StreamWriter {
 public:
  StreamWriter(std::ostream& os, const StreamHeader& header) : os_(os), header_(header) {
    os_.write("GNC1", 4);
    detail::put_bytes(os_, header.version, 1);
    detail::put_bytes(os_, header.m, 1);
    detail::put_bytes(os_, header.g, 2);
    detail::put_bytes(os_, header.n, 4);
    detail::put_bytes(os_, header.K, 4);
    detail::put_bytes(os_, header.payload_len, 4);
    detail::put_bytes(os_, header.seed, 8);
  }

  void write(const CodedPacket& packet) {
    const auto bytes = packet_to_bytes(packet, header_.m);
    detail::put_bytes(os_, bytes.size(), 4);
    os_.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }

 private:
  std::ostream& os_;
  StreamHeader header_;
};

class StreamReader {
 public:
  explicit StreamReader(std::istream& is) : is_(is) {
    char magic[4] = {};
    is_.read(magic, 4);
    if (is_.gcount() != 4 || std::string(magic, 4) != "GNC1")
      throw MalformedStream("bad stream magic");
    header_.version = static_cast<std::uint8_t>(detail::get_bytes(is_, 1));
    if (header_.version != 1) throw MalformedStream("unsupported stream version");
    header_.m = static_cast<std::uint8_t>(detail::get_bytes(is_, 1));
    header_.g = static_cast<std::uint16_t>(detail::get_bytes(is_, 2));
    header_.n = static_cast<std::uint32_t>(detail::get_bytes(is_, 4));
    header_.K = static_cast<std::uint32_t>(detail::get_bytes(is_, 4));
    header_.payload_len = static_cast<std::uint32_t>(detail::get_bytes(is_, 4));
    header_.seed = detail::get_bytes(is_, 8);
    if (header_.m != 1 && header_.m != 4 && header_.m != 8 && header_.m != 16)
      throw MalformedStream("stream header has invalid field degree");
    if (header_.g == 0 || header_.n == 0 || header_.K == 0 || header_.payload_len == 0)
      throw MalformedStream("stream header has zero geometry");
    record_bytes_ = 4 + packed_size(header_.g, header_.m) + packed_size(header_.payload_len, header_.m);
  }

  const StreamHeader& header() const { return header_; }

  /// Next packet, or nullopt at a clean end of stream. A partial trailing
  /// record or a record of the wrong size is malformed.
  std::optional<CodedPacket> next() {
    const int first = is_.peek();
    if (first == std::istream::traits_type::eof()) return std::nullopt;
    const std::uint32_t len = static_cast<std::uint32_t>(detail::get_bytes(is_, 4));
    if (len != record_bytes_) throw MalformedStream("packet record has unexpected length");
    std::vector<std::uint8_t> buf(len);
    is_.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(len));
    if (static_cast<std::uint32_t>(is_.gcount()) != len)
      throw MalformedStream("truncated packet record");
    auto pkt = packet_from_bytes(buf, header_.m, header_.g, header_.payload_len);
    if (pkt.generation >= header_.n) throw MalformedStream("packet generation out of range");
    return pkt;
  }

 private:
  std::istream& is_;
  StreamHeader header_;
  std::size_t record_bytes_ = 0;
};

}  // namespace gnc
