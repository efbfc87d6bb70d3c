// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <sstream>

#include "lux/dali.hpp"
#include "support/oracles.hpp"

using namespace lux::dali;
using lux::Rng;

TEST_CASE("known frame encodings") {
  Frame f = encode_frame(Address::short_address(3), Payload::dapc(128));
  CHECK(f.address == 0x06);
  CHECK(f.data == 0x80);
  Frame off = encode_frame(Address::broadcast(), Payload::command(kCmdOff));
  CHECK(off.address == 0xFF);
  CHECK(off.data == 0x00);
  Frame grp = encode_frame(Address::group(5), Payload::dapc(10));
  CHECK(grp.address == 0x8A);
}

TEST_CASE("encode rejects out-of-range input") {
  CHECK_THROWS_AS(encode_frame(Address::short_address(64), Payload::dapc(1)),
                  lux::ValidationError);
  CHECK_THROWS_AS(encode_frame(Address::group(16), Payload::dapc(1)), lux::ValidationError);
  CHECK_THROWS_AS(encode_frame(Address::short_address(1), Payload::dapc(255)),
                  lux::ValidationError);
}

TEST_CASE("decode of a known frame") {
  Decoded d = decode_frame({0x06, 0x80});
  CHECK(d.address.kind == Address::Kind::short_address);
  CHECK(d.address.value == 3);
  CHECK(d.payload.kind == PayloadKind::dapc);
  CHECK(d.payload.value == 128);
  Decoded special = decode_frame({0xA1, 0x00});
  CHECK(special.address.kind == Address::Kind::special);
}

TEST_CASE("round-trip over every encodable frame, against the reference codec") {
  // short DAPC: 64 x 255
  for (int a = 0; a < 64; ++a)
    for (int level = 0; level <= 254; ++level) {
      const Frame f = encode_frame(Address::short_address(a), Payload::dapc(level));
      const auto ref = oracle::ref_encode_short_dapc(a, level);
      REQUIRE(f.address == ref.address_byte);
      REQUIRE(f.data == ref.data_byte);
      const Decoded d = decode_frame(f);
      REQUIRE(d.address == Address::short_address(a));
      REQUIRE(d.payload == Payload::dapc(level));
    }
  // short commands: 64 x 256
  for (int a = 0; a < 64; ++a)
    for (int op = 0; op <= 255; ++op) {
      const Frame f = encode_frame(Address::short_address(a),
                                   Payload::command(static_cast<uint8_t>(op)));
      const auto ref = oracle::ref_encode_short_command(a, static_cast<unsigned>(op));
      REQUIRE(f.address == ref.address_byte);
      const Decoded d = decode_frame(f);
      REQUIRE(d.address == Address::short_address(a));
      REQUIRE(d.payload == Payload::command(static_cast<uint8_t>(op)));
    }
  // groups and broadcast
  for (int g = 0; g < 16; ++g)
    for (bool cmd : {false, true}) {
      const Frame f = encode_frame(Address::group(g),
                                   cmd ? Payload::command(1) : Payload::dapc(1));
      const auto ref = oracle::ref_encode_group(g, cmd, 1);
      REQUIRE(f.address == ref.address_byte);
      const Decoded d = decode_frame(f);
      REQUIRE(d.address == Address::group(g));
    }
  for (bool cmd : {false, true}) {
    const Frame f =
        encode_frame(Address::broadcast(), cmd ? Payload::command(7) : Payload::dapc(7));
    REQUIRE(f.address == oracle::ref_encode_broadcast(cmd, 7).address_byte);
    REQUIRE(decode_frame(f).address.kind == Address::Kind::broadcast);
  }
}

TEST_CASE("decode classification matches the reference over all 65536 frames") {
  for (int bits = 0; bits < 65536; ++bits) {
    const Frame f{static_cast<uint8_t>(bits >> 8), static_cast<uint8_t>(bits & 0xff)};
    const Decoded d = decode_frame(f);
    const auto ref = oracle::ref_decode({f.address, f.data});
    switch (ref.kind) {
      case oracle::RefKind::short_address:
        REQUIRE(d.address.kind == Address::Kind::short_address);
        REQUIRE(d.address.value == ref.target);
        break;
      case oracle::RefKind::group:
        REQUIRE(d.address.kind == Address::Kind::group);
        REQUIRE(d.address.value == ref.target);
        break;
      case oracle::RefKind::broadcast:
        REQUIRE(d.address.kind == Address::Kind::broadcast);
        break;
      case oracle::RefKind::special:
        REQUIRE(d.address.kind == Address::Kind::special);
        break;
    }
    REQUIRE((d.payload.kind == PayloadKind::command) == ref.is_command);
  }
}

TEST_CASE("logarithmic dimming curve endpoints and shape") {
  CHECK(level_to_flux(0) == 0.0);
  CHECK(std::abs(level_to_flux(254) - 1.0) <= 1e-12);
  CHECK(std::abs(level_to_flux(1) - 0.001) <= 1e-12);
  CHECK_THROWS_AS(level_to_flux(255), lux::ValidationError);
  CHECK_THROWS_AS(level_to_flux(-1), lux::ValidationError);

  const double ratio = level_to_flux(2) / level_to_flux(1);
  for (int n = 1; n < 254; ++n) {
    CHECK(level_to_flux(n + 1) > level_to_flux(n));
    CHECK(std::abs(level_to_flux(n + 1) / level_to_flux(n) - ratio) <= 1e-12);
  }
}

TEST_CASE("broadcast DAPC drives every gear with no reply") {
  Bus bus;
  for (int a : {1, 5, 9}) bus.attach(a);
  auto backward = bus.transact(encode_frame(Address::broadcast(), Payload::dapc(254)));
  CHECK_FALSE(backward.has_value());
  for (const auto& g : bus.gears()) {
    CHECK(g.level == 254);
    CHECK(g.lamp_on);
  }
}

TEST_CASE("query reports the actual level of a lone responder") {
  Bus bus;
  bus.attach(3);
  bus.transact(encode_frame(Address::short_address(3), Payload::dapc(128)));
  auto reply = bus.transact(
      encode_frame(Address::short_address(3), Payload::command(kCmdQueryActualLevel)));
  REQUIRE(reply);
  CHECK(*reply == 0x80);
}

TEST_CASE("group queries with two members collide into silence") {
  Bus bus;
  bus.attach(1, 0b0001);
  bus.attach(2, 0b0001);
  bus.transact(encode_frame(Address::group(0), Payload::dapc(100)));
  CHECK(bus.gear(1)->level == 100);
  CHECK(bus.gear(2)->level == 100);
  auto reply =
      bus.transact(encode_frame(Address::group(0), Payload::command(kCmdQueryActualLevel)));
  CHECK_FALSE(reply.has_value());
}

TEST_CASE("off command zeroes the level and the lamp flag") {
  Bus bus;
  bus.attach(7);
  bus.transact(encode_frame(Address::short_address(7), Payload::dapc(200)));
  CHECK(bus.gear(7)->lamp_on);
  bus.transact(encode_frame(Address::short_address(7), Payload::command(kCmdOff)));
  CHECK(bus.gear(7)->level == 0);
  CHECK_FALSE(bus.gear(7)->lamp_on);
}

TEST_CASE("special frames leave gear state untouched") {
  Bus bus;
  bus.attach(0);
  bus.transact(encode_frame(Address::short_address(0), Payload::dapc(50)));
  bus.transact({0xA1, 0x00});
  CHECK(bus.gear(0)->level == 50);
}

TEST_CASE("bus attachment limits") {
  Bus bus;
  for (int a = 0; a < 64; ++a) bus.attach(a);
  CHECK_THROWS_AS(bus.attach(10), lux::ValidationError);  // duplicate reported first
  Bus bus2;
  bus2.attach(1);
  CHECK_THROWS_WITH(bus2.attach(1), Catch::Matchers::ContainsSubstring("duplicate short address"));
}

TEST_CASE("replaying a frame log reproduces gear state bit-exactly") {
  Bus bus;
  for (int a = 0; a < 8; ++a) bus.attach(a, static_cast<uint16_t>(1u << (a % 3)));
  Rng rng(606);
  for (int k = 0; k < 500; ++k) {
    const Frame f{static_cast<uint8_t>(rng.next_below(256)),
                  static_cast<uint8_t>(rng.next_below(256))};
    bus.transact(f);
  }
  std::ostringstream log_text;
  bus.write_log(log_text);
  std::istringstream log_in(log_text.str());
  const auto frames = Bus::read_log(log_in);
  REQUIRE(frames.size() == 500);

  Bus replay;
  for (int a = 0; a < 8; ++a) replay.attach(a, static_cast<uint16_t>(1u << (a % 3)));
  for (const Frame& f : frames) replay.transact(f);
  for (int a = 0; a < 8; ++a) {
    CHECK(replay.gear(a)->level == bus.gear(a)->level);
    CHECK(replay.gear(a)->lamp_on == bus.gear(a)->lamp_on);
  }
}

TEST_CASE("frame logs with stale sequence numbers are rejected") {
  std::istringstream bad("1 06 80\n1 07 80\n");
  CHECK_THROWS_AS(Bus::read_log(bad), lux::ParseError);
}
