#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "fdas/config.hpp"
#include "fdas/fop_prep.hpp"
#include "fdas/harmonic.hpp"
#include "fdas/signal_io.hpp"
#include "fdas/timing.hpp"
#include "support/oracles.hpp"

using namespace fdas;

TEST_CASE("config defaults and empty text") {
  const FdasConfig c = parse_config("");
  CHECK(c.n_temp == 85);
  CHECK(c.n_chan == (1u << 21));
  CHECK(c.n_tap == 421);
  CHECK(c.n_hp == 8);
  CHECK(c.n_cand == 200);
  CHECK(c.n_dm_trial == 6000);
  CHECK(c.t_obs == 540.0);
  CHECK_FALSE(c.t_limit.has_value());
  CHECK(parse_config("  \n\t") == c);
}

TEST_CASE("config round trip") {
  FdasConfig c = FdasConfig::desk_scale();
  c.t_limit = 0.27;
  c.thresholds = {1, 2, 3, 4, 5, 6, 7, 8};
  CHECK(parse_config(config_to_json(c)) == c);
}

TEST_CASE("config errors name the field") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(R"({"n_temp": 84})").find("n_temp") != std::string::npos);
  CHECK(message(R"({"n_chan": 1000})").find("n_chan") != std::string::npos);
  CHECK(message(R"({"n_taps": 3})").find("n_taps") != std::string::npos);
  CHECK(message(R"({"n_hp": "eight"})").find("n_hp") != std::string::npos);
  CHECK(message(R"({"n_tap": -5})").find("n_tap") != std::string::npos);
  CHECK(message(R"({"thresholds": [1, 2]})").find("thresholds") != std::string::npos);
  CHECK(message(R"({"t_limit": 0})").find("t_limit") != std::string::npos);
  CHECK_FALSE(message("{").empty());
  CHECK_FALSE(message("[1]").empty());
}

TEST_CASE("fop file round trip is bit exact") {
  std::mt19937_64 rng(3);
  Fop f = oracle::random_fop(rng, 7, 33);
  f.values()[5] = -0.0f;
  f.values()[6] = std::numeric_limits<float>::denorm_min();
  std::stringstream ss;
  write_fop(ss, f);
  CHECK(ss.str().size() == 12 + 4 * f.size());
  const Fop g = read_fop(ss);
  CHECK(g == f);
  CHECK(std::signbit(g.values()[5]));
}

TEST_CASE("fop file layout is little endian") {
  Fop f(1, 1, {1.0f});
  std::stringstream ss;
  write_fop(ss, f);
  const std::string s = ss.str();
  CHECK(s.substr(0, 4) == "FOP1");
  CHECK(static_cast<unsigned char>(s[4]) == 1);
  CHECK(static_cast<unsigned char>(s[8]) == 1);
  // 1.0f = 0x3f800000
  CHECK(static_cast<unsigned char>(s[14]) == 0x80);
  CHECK(static_cast<unsigned char>(s[15]) == 0x3f);
}

TEST_CASE("fop file structural errors") {
  Fop f(3, 4);
  std::stringstream ss;
  write_fop(ss, f);
  std::string bytes = ss.str();

  std::stringstream shorter(bytes.substr(0, bytes.size() - 4));
  CHECK_THROWS_AS(read_fop(shorter), StructuralError);
  std::stringstream longer(bytes + "xxxx");
  CHECK_THROWS_AS(read_fop(longer), StructuralError);
  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream magic(bad);
  CHECK_THROWS_AS(read_fop(magic), StructuralError);
  CHECK_THROWS_AS(Fop(2, 2, std::vector<float>(3)), StructuralError);
}

TEST_CASE("series file round trip") {
  std::mt19937_64 rng(5);
  ComplexSeries s(oracle::random_signal(rng, 100));
  const auto path = std::filesystem::temp_directory_path() / "fdas_series_test.bin";
  save_series(s, path);
  CHECK(load_series(path) == s);
  std::filesystem::remove(path);
}

TEST_CASE("rfop file round trip and shape check") {
  std::mt19937_64 rng(9);
  const Fop f = oracle::random_fop(rng, 9, 100);
  const RFop r = reorder(f, 16, 8);
  std::stringstream ss;
  write_rfop(ss, r);
  const std::string bytes = ss.str();
  std::stringstream in(bytes);
  CHECK(read_rfop(in, 9, 100) == r);
  std::stringstream wrong(bytes);
  CHECK_THROWS_AS(read_rfop(wrong, 9, 200), StructuralError);
  std::stringstream cut(bytes.substr(0, bytes.size() - 1));
  CHECK_THROWS_AS(read_rfop(cut, 9, 100), StructuralError);
}

TEST_CASE("candidate csv round trip keeps exact powers") {
  CandidateList list;
  list.entries = {{1, 0, 10, 3.14159274f}, {2, -3, 0, 1e-7f}, {8, 4, 4095, 123456.789f}, {3, 1, 7, 0.1f}};
  std::stringstream ss;
  write_candidates_csv(ss, list);
  CHECK(ss.str().rfind("harmonic,template,channel,power\n", 0) == 0);
  CHECK(read_candidates_csv(ss) == list);

  std::stringstream bad("harmonic,template,channel,power\n1,2,x,4\n");
  CHECK_THROWS_AS(read_candidates_csv(bad), ParseError);
  std::stringstream noheader("1,2,3,4\n");
  CHECK_THROWS_AS(read_candidates_csv(noheader), ParseError);
}

TEST_CASE("timing json lumped and detailed forms") {
  const auto set = parse_timings(R"({"unit": "ms", "combinations": [
      {"combination": "harp", "t_ft": 347, "t_fop": 560, "t_hm": 122},
      {"combination": "split", "ft_launch": [10, 10, 10], "t_klo": 1, "prep": ["discard", "transpose"],
       "t_discard": 5, "t_transpose": 2, "t_hm": 8, "demand": {"ft": 1e9, "hm": 2e9}, "fop_bytes": 4096}]})");
  REQUIRE(set.combinations.size() == 2);
  CHECK(set.seconds_per_unit() == 1e-3);
  const StageTiming& a = set.combinations[0].timing;
  CHECK(a.t_ft() == 347);
  CHECK(a.t_fop() == 560);
  const StageTiming& b = set.combinations[1].timing;
  CHECK(b.n_ft_launch() == 3);
  CHECK(b.t_ft() == 33);
  CHECK(b.t_fop() == 7);
  CHECK(b.prep == PrepFlags{true, true, false});
  CHECK(b.demand.hm == 2e9);

  const auto again = parse_timings(timings_to_json(set));
  REQUIRE(again.combinations.size() == 2);
  CHECK(again.combinations[0].timing == a);
  CHECK(again.combinations[1].timing == b);
}

TEST_CASE("timing json errors") {
  CHECK_THROWS_AS(parse_timings("{"), ParseError);
  CHECK_THROWS_AS(parse_timings(R"({"unit": "min", "combinations": []})"), ParseError);
  CHECK_THROWS_AS(parse_timings(R"({"combinations": [{"combination": "x", "t_fop": 1, "t_hm": 1}]})"), ParseError);
  CHECK_THROWS_AS(parse_timings(R"({"combinations": [{"combination": "x", "t_ft": -1, "t_hm": 1}]})"), ParseError);
  CHECK_THROWS_AS(parse_timings(R"({"combinations": [{"combination": "x", "t_ft": 1, "t_hm": 1, "bogus": 2}]})"),
                  ParseError);
  CHECK_THROWS_AS(
      parse_timings(R"({"combinations": [{"combination": "x", "ft_launch": [1, 2], "t_ft": 4, "t_hm": 1}]})"),
      ParseError);
  CHECK_THROWS_AS(parse_timings(R"({"combinations": [{"combination": "x", "t_ft": 1, "t_hm": 1,
      "prep": ["discard"], "t_discard": 2, "t_fop": 3}]})"),
                  ParseError);
  CHECK(parse_timings(R"({"combinations": []})").combinations.empty());
}
