// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "lux/gateway.hpp"

using namespace lux::dali;

TEST_CASE("gateway line protocol") {
  Bus bus;
  bus.attach(3);
  bus.attach(4, 0b0010);
  Gateway gw(bus);

  CHECK(gw.handle_line("DAPC 3 128") == "OK");
  CHECK(bus.gear(3)->level == 128);
  CHECK(gw.handle_line("QUERY 3") == "LEVEL 128");
  CHECK(gw.handle_line("DAPC G1 40") == "OK");
  CHECK(bus.gear(4)->level == 40);
  CHECK(gw.handle_line("DAPC BCAST 254") == "OK");
  CHECK(bus.gear(3)->level == 254);
  CHECK(bus.gear(4)->level == 254);
  CHECK(gw.handle_line("OFF 3") == "OK");
  CHECK(bus.gear(3)->level == 0);
  CHECK(gw.handle_line("QUERY 3") == "LEVEL 0");

  CHECK(gw.handle_line("").rfind("ERR", 0) == 0);
  CHECK(gw.handle_line("NOPE 1 2").rfind("ERR", 0) == 0);
  CHECK(gw.handle_line("DAPC 3 400").rfind("ERR", 0) == 0);
  CHECK(gw.handle_line("DAPC 99 1").rfind("ERR", 0) == 0);
  CHECK(gw.handle_line("QUERY 9").rfind("ERR", 0) == 0);  // nobody home
}

TEST_CASE("gateway serves the protocol over loopback TCP") {
  Bus bus;
  bus.attach(0);
  bus.attach(1);
  GatewayServer server(bus);
  const int port = server.start(0);
  REQUIRE(port > 0);
  {
    GatewayClient client("127.0.0.1", port);
    CHECK(client.request("DAPC 0 200") == "OK");
    CHECK(client.request("DAPC 1 10") == "OK");
    CHECK(client.request("QUERY 0") == "LEVEL 200");
    CHECK(client.request("QUERY 1") == "LEVEL 10");
    CHECK(client.request("garbage").rfind("ERR", 0) == 0);
  }
  server.stop();
  CHECK(bus.gear(0)->level == 200);
  CHECK(bus.gear(1)->level == 10);
  // every line travelled as a real frame on the bus
  CHECK(bus.log().size() == 4);
}
