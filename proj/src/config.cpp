#include "fdas/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include <json.hpp>

namespace fdas {

using nlohmann::json;

FdasConfig FdasConfig::desk_scale() {
  FdasConfig c;
  c.n_chan = 1u << 12;
  c.n_temp = 9;
  c.n_tap = 33;
  c.n_hp = 8;
  c.n_cand = 16;
  return c;
}

void FdasConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("config field '" + field + "': " + why);
  };
  if (n_temp == 0 || n_temp % 2 == 0) fail("n_temp", "must be odd");
  if (!is_power_of_two(n_chan)) fail("n_chan", "must be a power of two");
  if (n_tap < 1) fail("n_tap", "must be >= 1");
  if (n_hp < 1) fail("n_hp", "must be >= 1");
  if (n_cand < 1) fail("n_cand", "must be >= 1");
  if (!(t_obs > 0.0)) fail("t_obs", "must be > 0");
  if (t_limit && !(*t_limit > 0.0)) fail("t_limit", "must be > 0");
  if (!thresholds.empty() && thresholds.size() != n_hp) fail("thresholds", "needs one value per harmonic");
  for (double t : thresholds) {
    if (!std::isfinite(t) || t <= 0.0) fail("thresholds", "values must be finite and > 0");
  }
}

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if constexpr (std::is_unsigned_v<T>) {
    if (!it->is_number_unsigned()) throw ParseError(std::string("config field '") + key + "': must be a non-negative integer");
  }
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

FdasConfig parse_config(const std::string& json_text) {
  FdasConfig c;
  if (json_text.find_first_not_of(" \t\r\n") == std::string::npos) return c;

  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config: top level must be an object");

  static const char* known[] = {"n_beams", "n_dm_trial", "t_obs",  "n_temp",  "n_chan",    "n_tap",
                                "n_hp",    "n_cand",     "t_limit", "thresholds"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw ParseError("config field '" + item.key() + "': unknown key");
  }

  read_field(j, "n_beams", c.n_beams);
  read_field(j, "n_dm_trial", c.n_dm_trial);
  read_field(j, "t_obs", c.t_obs);
  read_field(j, "n_temp", c.n_temp);
  read_field(j, "n_chan", c.n_chan);
  read_field(j, "n_tap", c.n_tap);
  read_field(j, "n_hp", c.n_hp);
  read_field(j, "n_cand", c.n_cand);
  read_field(j, "thresholds", c.thresholds);
  if (auto it = j.find("t_limit"); it != j.end() && !it->is_null()) {
    double v = 0.0;
    read_field(j, "t_limit", v);
    c.t_limit = v;
  }

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return c;
}

std::string config_to_json(const FdasConfig& c) {
  json j = {{"n_beams", c.n_beams}, {"n_dm_trial", c.n_dm_trial}, {"t_obs", c.t_obs},
            {"n_temp", c.n_temp},   {"n_chan", c.n_chan},         {"n_tap", c.n_tap},
            {"n_hp", c.n_hp},       {"n_cand", c.n_cand}};
  if (c.t_limit) j["t_limit"] = *c.t_limit;
  if (!c.thresholds.empty()) j["thresholds"] = c.thresholds;
  return j.dump(2);
}

FdasConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void save_config(const FdasConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config " + path.string());
  out << config_to_json(config) << '\n';
}

}  // namespace fdas
