// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lux/common.hpp"

namespace lux::dali {

// 16-bit forward frame: address byte + data byte. Backward frames are a bare
// byte and only exist as query replies.
struct Frame {
  uint8_t address = 0;
  uint8_t data = 0;

  uint16_t bits() const { return static_cast<uint16_t>((address << 8) | data); }
  bool operator==(const Frame&) const = default;
};

struct Address {
  enum class Kind { short_address, group, broadcast, special };
  Kind kind = Kind::broadcast;
  int value = 0;  // short 0..63 or group 0..15

  static Address short_address(int a) { return {Kind::short_address, a}; }
  static Address group(int g) { return {Kind::group, g}; }
  static Address broadcast() { return {Kind::broadcast, 0}; }

  bool operator==(const Address&) const = default;
};

enum class PayloadKind { dapc, command };

struct Payload {
  PayloadKind kind = PayloadKind::dapc;
  uint8_t value = 0;  // arc level or opcode

  static Payload dapc(int level) { return {PayloadKind::dapc, static_cast<uint8_t>(level)}; }
  static Payload command(uint8_t opcode) { return {PayloadKind::command, opcode}; }

  bool operator==(const Payload&) const = default;
};

// Opcodes used by the gateway; the full command table is out of scope.
inline constexpr uint8_t kCmdOff = 0x00;
inline constexpr uint8_t kCmdQueryActualLevel = 0xA0;

inline Frame encode_frame(const Address& addr, const Payload& payload) {
  if (payload.kind == PayloadKind::dapc && payload.value == 255)
    throw ValidationError("DAPC level 255 is reserved (MASK)");
  const uint8_t select = payload.kind == PayloadKind::command ? 1 : 0;
  uint8_t address_byte = 0;
  switch (addr.kind) {
    case Address::Kind::short_address:
      if (addr.value < 0 || addr.value > 63)
        throw ValidationError("short address out of range 0..63");
      address_byte = static_cast<uint8_t>((addr.value << 1) | select);
      break;
    case Address::Kind::group:
      if (addr.value < 0 || addr.value > 15)
        throw ValidationError("group out of range 0..15");
      address_byte = static_cast<uint8_t>(0x80 | (addr.value << 1) | select);
      break;
    case Address::Kind::broadcast:
      address_byte = static_cast<uint8_t>(0xFE | select);
      break;
    case Address::Kind::special:
      throw ValidationError("cannot encode a special address");
  }
  return {address_byte, payload.value};
}

struct Decoded {
  Address address;
  Payload payload;
};

// Total over all 16-bit frames; reserved address patterns come back as
// Kind::special and gears ignore them.
inline Decoded decode_frame(const Frame& f) {
  Decoded d;
  const bool is_command = (f.address & 1) != 0;
  d.payload.kind = is_command ? PayloadKind::command : PayloadKind::dapc;
  d.payload.value = f.data;
  if ((f.address & 0x80) == 0) {
    d.address = Address{Address::Kind::short_address, f.address >> 1};
  } else if ((f.address & 0xE0) == 0x80) {
    d.address = Address{Address::Kind::group, (f.address >> 1) & 0x0F};
  } else if (f.address >= 0xFE) {
    d.address = Address::broadcast();
  } else {
    d.address = Address{Address::Kind::special, f.address};
  }
  return d;
}

// Standard logarithmic dimming curve: level 0 is off, levels 1..254 span
// 0.1% .. 100% with a constant ratio between adjacent levels.
inline double level_to_flux(int level) {
  if (level < 0 || level > 254) throw ValidationError("arc level out of range 0..254");
  if (level == 0) return 0.0;
  return std::pow(10.0, (level - 1) / (253.0 / 3.0) - 3.0);
}

struct GearState {
  int short_address = 0;
  int level = 0;          // actual arc level 0..254
  uint16_t groups = 0;    // membership bitmask
  bool lamp_on = false;   // level > 0

  bool member_of(int group) const { return (groups >> group) & 1; }
};

// Strictly serialized single-channel bus with up to 64 control gears.
// Transactions mutate gear state and yield at most one backward frame;
// multi-responder queries are suppressed (collision rule).
class Bus {
 public:
  void attach(int short_address, uint16_t groups = 0) {
    if (gears_.size() >= 64) throw ValidationError("bus supports at most 64 gears");
    for (const GearState& g : gears_)
      if (g.short_address == short_address)
        throw ValidationError("duplicate short address " + std::to_string(short_address));
    if (short_address < 0 || short_address > 63)
      throw ValidationError("short address out of range 0..63");
    gears_.push_back({short_address, 0, groups, false});
  }

  std::optional<uint8_t> transact(const Frame& frame) {
    log_.push_back(frame);
    const Decoded d = decode_frame(frame);
    if (d.address.kind == Address::Kind::special) return std::nullopt;
    std::vector<GearState*> targets;
    for (GearState& g : gears_) {
      const bool match = d.address.kind == Address::Kind::broadcast ||
                         (d.address.kind == Address::Kind::short_address &&
                          g.short_address == d.address.value) ||
                         (d.address.kind == Address::Kind::group && g.member_of(d.address.value));
      if (match) targets.push_back(&g);
    }
    if (d.payload.kind == PayloadKind::dapc) {
      if (d.payload.value == 255) return std::nullopt;  // MASK: no change
      for (GearState* g : targets) set_level(*g, d.payload.value);
      return std::nullopt;
    }
    switch (d.payload.value) {
      case kCmdOff:
        for (GearState* g : targets) set_level(*g, 0);
        return std::nullopt;
      case kCmdQueryActualLevel:
        if (targets.size() == 1)  // a lone responder; otherwise replies collide
          return static_cast<uint8_t>(targets.front()->level);
        return std::nullopt;
      default:
        return std::nullopt;  // unmodeled command: no state change, no reply
    }
  }

  const std::vector<GearState>& gears() const { return gears_; }
  const std::vector<Frame>& log() const { return log_; }

  const GearState* gear(int short_address) const {
    for (const GearState& g : gears_)
      if (g.short_address == short_address) return &g;
    return nullptr;
  }

  // Frame log: `<seq> <address hex> <data hex>` per line, seq ascending.
  void write_log(std::ostream& out) const {
    char buf[32];
    for (size_t k = 0; k < log_.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%zu %02X %02X\n", k + 1, log_[k].address, log_[k].data);
      out << buf;
    }
  }

  void write_log(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write frame log: " + path);
    write_log(out);
  }

  static std::vector<Frame> read_log(std::istream& in) {
    std::vector<Frame> frames;
    std::string line;
    long last_seq = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      long seq;
      unsigned a, d;
      if (!(ls >> seq >> std::hex >> a >> d))
        throw ParseError("bad frame log line: " + line);
      if (seq <= last_seq) throw ParseError("frame log sequence numbers must increase");
      last_seq = seq;
      frames.push_back({static_cast<uint8_t>(a), static_cast<uint8_t>(d)});
    }
    return frames;
  }

  static std::vector<Frame> read_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open frame log: " + path);
    return read_log(in);
  }

 private:
  static void set_level(GearState& g, int level) {
    g.level = level;
    g.lamp_on = level > 0;
  }

  std::vector<GearState> gears_;
  std::vector<Frame> log_;
};

}  // namespace lux::dali
