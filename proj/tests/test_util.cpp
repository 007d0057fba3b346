#include "doctest.h"

#include "netprof/rng.hpp"
#include "netprof/util.hpp"

using namespace netprof;

TEST_CASE("hex round trip") {
  Rng rng(7);
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<uint8_t> data(rng.uniform(200));
    for (auto& b : data) b = static_cast<uint8_t>(rng.uniform(256));
    CHECK(hex_decode(hex_encode(data)) == data);
  }
  CHECK_THROWS(hex_decode("abc"));
  CHECK_THROWS(hex_decode("zz"));
}

TEST_CASE("csv escape and parse round trip") {
  std::vector<std::string> fields = {"plain", "with,comma", "with\"quote", "trailer", ""};
  std::string line;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_escape(fields[i]);
  }
  CHECK(csv_parse_line(line) == fields);
}

TEST_CASE("civil time to epoch") {
  CHECK(civil_to_epoch_us(1970, 1, 1, 0, 0, 0) == 0);
  // 2014-07-01 00:00:00 UTC
  CHECK(civil_to_epoch_us(2014, 7, 1, 0, 0, 0) == 1404172800ll * 1000000);
  // leap day
  CHECK(civil_to_epoch_us(2016, 2, 29, 12, 0, 0) == 1456747200ll * 1000000);
}

TEST_CASE("substream decorrelates seeds") {
  CHECK(substream(1, 0) != substream(1, 1));
  CHECK(substream(1, 0) != substream(2, 0));
  Rng a(substream(1, 0)), b(substream(1, 1));
  CHECK(a.next_u64() != b.next_u64());
}
