#include <bit>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "doctest.h"
#include "gaflab/csv.hpp"
#include "gaflab/error.hpp"

using namespace gaflab;
namespace fs = std::filesystem;

namespace {

double parse(const std::string& s) {
  double x = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  REQUIRE(r.ec == std::errc());
  REQUIRE(r.ptr == s.data() + s.size());
  return x;
}

}  // namespace

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(-0.0) == "-0");
  CHECK(format_double(1e-8) == "1e-08");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(format_double(NAN) == "nan");
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 20000; ++i) {
    const double x = std::bit_cast<double>(bits(rng));
    if (!std::isfinite(x)) continue;
    REQUIRE(parse(format_double(x)) == x);
  }
  CHECK(parse(format_double(std::numeric_limits<double>::denorm_min())) ==
        std::numeric_limits<double>::denorm_min());
}

TEST_CASE("table quoting and arity") {
  CsvTable t({"a", "b"});
  t.row({"plain", "has,comma"});
  t.row({"has \"quote\"", "line\nbreak"});
  CHECK(t.rows() == 2);
  CHECK(t.text() == "a,b\nplain,\"has,comma\"\n\"has \"\"quote\"\"\",\"line\nbreak\"\n");
  CHECK_THROWS(t.row({"only one"}));
  CHECK(csv_field(true) == "true");
  CHECK(csv_field(std::size_t{12}) == "12");
  CHECK(csv_field(std::int64_t{-3}) == "-3");
  CHECK(csv_field(0.25) == "0.25");
}

TEST_CASE("atomic writes") {
  const fs::path dir = fs::temp_directory_path() / "gaflab_csv_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path p = dir / "out.csv";
  write_file_atomic(p, "x\n1\n");
  CHECK(read_file(p) == "x\n1\n");
  write_file_atomic(p, "y\n");
  CHECK(read_file(p) == "y\n");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
  write_file_atomic(dir / "nested" / "deeper" / "f.csv", "z");
  CHECK(read_file(dir / "nested" / "deeper" / "f.csv") == "z");
  // A regular file in the way of the parent directory.
  CHECK_THROWS_AS(write_file_atomic(p / "child.csv", "z"), IoError);
  CHECK_THROWS_AS(read_file(dir / "nope.csv"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}
