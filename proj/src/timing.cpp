#include "fdas/timing.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fdas {

using nlohmann::json;

double StageTiming::t_ft() const {
  return std::accumulate(ft_launch.begin(), ft_launch.end(), 0.0) + static_cast<double>(ft_launch.size()) * t_klo;
}

double StageTiming::t_fop() const {
  return (prep.discard ? t_discard : 0.0) + (prep.transpose ? t_transpose : 0.0) + (prep.reorder ? t_reorder : 0.0) +
         t_fop_unsplit;
}

void StageTiming::validate() const {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument(std::string("timing field '") + name + "' must be >= 0");
  };
  for (double v : ft_launch) check(v, "ft_launch");
  check(t_klo, "t_klo");
  check(t_discard, "t_discard");
  check(t_transpose, "t_transpose");
  check(t_reorder, "t_reorder");
  check(t_fop_unsplit, "t_fop");
  check(t_hm, "t_hm");
  check(demand.ft, "demand.ft");
  check(demand.discard, "demand.discard");
  check(demand.transpose, "demand.transpose");
  check(demand.reorder, "demand.reorder");
  check(demand.fop, "demand.fop");
  check(demand.hm, "demand.hm");
  check(fop_bytes, "fop_bytes");
}

StageTiming StageTiming::lumped(double t_ft, double t_fop, double t_hm) {
  StageTiming st;
  st.ft_launch = {t_ft};
  st.t_fop_unsplit = t_fop;
  st.t_hm = t_hm;
  return st;
}

double TimingSet::seconds_per_unit() const {
  if (unit == "s") return 1.0;
  if (unit == "ms") return 1e-3;
  if (unit == "us") return 1e-6;
  throw ParseError("timing unit '" + unit + "' not one of s, ms, us");
}

namespace {

void fail(const std::string& where, const std::string& why) { throw ParseError(where + ": " + why); }

double number(const json& j, const char* key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_number()) fail(where, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

StageTiming parse_one(const json& j, const std::string& where) {
  static const char* known[] = {"combination", "t_ft",        "ft_launch", "t_klo",     "t_fop",
                                "prep",        "t_discard",   "t_transpose", "t_reorder", "t_hm",
                                "demand",      "fop_bytes"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) fail(where, "unknown key '" + item.key() + "'");
  }

  StageTiming st;
  if (j.contains("t_klo")) st.t_klo = number(j, "t_klo", where);
  if (j.contains("ft_launch")) {
    const auto& a = j.at("ft_launch");
    if (!a.is_array()) fail(where, "ft_launch must be an array");
    for (const auto& v : a) {
      if (!v.is_number()) fail(where, "ft_launch entries must be numbers");
      st.ft_launch.push_back(v.get<double>());
    }
    if (j.contains("t_ft") && !close(st.t_ft(), number(j, "t_ft", where))) {
      fail(where, "t_ft disagrees with sum of ft_launch plus overheads");
    }
  } else if (j.contains("t_ft")) {
    st.ft_launch = {number(j, "t_ft", where)};
  } else {
    fail(where, "needs t_ft or ft_launch");
  }

  if (j.contains("prep")) {
    const auto& p = j.at("prep");
    if (!p.is_array()) fail(where, "prep must be an array of stage names");
    for (const auto& v : p) {
      const std::string s = v.is_string() ? v.get<std::string>() : "";
      if (s == "discard") st.prep.discard = true;
      else if (s == "transpose") st.prep.transpose = true;
      else if (s == "reorder") st.prep.reorder = true;
      else fail(where, "unknown prep stage " + v.dump());
    }
    if (j.contains("t_discard")) st.t_discard = number(j, "t_discard", where);
    if (j.contains("t_transpose")) st.t_transpose = number(j, "t_transpose", where);
    if (j.contains("t_reorder")) st.t_reorder = number(j, "t_reorder", where);
    if (j.contains("t_fop") && !close(st.t_fop(), number(j, "t_fop", where))) {
      fail(where, "t_fop disagrees with its components");
    }
  } else {
    if (j.contains("t_discard") || j.contains("t_transpose") || j.contains("t_reorder")) {
      fail(where, "component FOP times need a prep list");
    }
    if (j.contains("t_fop")) st.t_fop_unsplit = number(j, "t_fop", where);
  }

  if (!j.contains("t_hm")) fail(where, "needs t_hm");
  st.t_hm = number(j, "t_hm", where);

  if (j.contains("demand")) {
    const auto& d = j.at("demand");
    if (!d.is_object()) fail(where, "demand must be an object");
    for (const auto& item : d.items()) {
      if (!item.value().is_number()) fail(where, "demand." + item.key() + " must be a number");
      const double v = item.value().get<double>();
      if (item.key() == "ft") st.demand.ft = v;
      else if (item.key() == "discard") st.demand.discard = v;
      else if (item.key() == "transpose") st.demand.transpose = v;
      else if (item.key() == "reorder") st.demand.reorder = v;
      else if (item.key() == "fop") st.demand.fop = v;
      else if (item.key() == "hm") st.demand.hm = v;
      else fail(where, "unknown demand stage '" + item.key() + "'");
    }
  }
  if (j.contains("fop_bytes")) st.fop_bytes = number(j, "fop_bytes", where);

  try {
    st.validate();
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
  return st;
}

}  // namespace

TimingSet parse_timings(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("timings: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("timings: top level must be an object");
  for (const auto& item : j.items()) {
    if (item.key() != "unit" && item.key() != "combinations") fail("timings", "unknown key '" + item.key() + "'");
  }

  TimingSet set;
  if (j.contains("unit")) {
    if (!j["unit"].is_string()) fail("timings", "unit must be a string");
    set.unit = j["unit"].get<std::string>();
    set.seconds_per_unit();
  }
  if (!j.contains("combinations") || !j["combinations"].is_array()) fail("timings", "needs a combinations array");
  std::size_t idx = 0;
  for (const auto& c : j["combinations"]) {
    const std::string where = "timings combination " + std::to_string(idx++);
    if (!c.is_object()) fail(where, "must be an object");
    if (!c.contains("combination") || !c["combination"].is_string()) fail(where, "needs a combination name");
    try {
      set.combinations.push_back({c["combination"].get<std::string>(), parse_one(c, where)});
    } catch (const json::exception& e) {
      fail(where, e.what());
    }
  }
  return set;
}

std::string timings_to_json(const TimingSet& set) {
  json out;
  out["unit"] = set.unit;
  out["combinations"] = json::array();
  for (const auto& c : set.combinations) {
    const StageTiming& st = c.timing;
    json row;
    row["combination"] = c.combination;
    row["ft_launch"] = st.ft_launch;
    row["t_klo"] = st.t_klo;
    row["t_ft"] = st.t_ft();
    if (st.prep.any()) {
      json p = json::array();
      if (st.prep.discard) p.push_back("discard");
      if (st.prep.transpose) p.push_back("transpose");
      if (st.prep.reorder) p.push_back("reorder");
      row["prep"] = p;
      row["t_discard"] = st.t_discard;
      row["t_transpose"] = st.t_transpose;
      row["t_reorder"] = st.t_reorder;
      if (st.t_fop_unsplit != 0.0) throw std::invalid_argument("timing mixes component and unsplit FOP times");
    }
    row["t_fop"] = st.t_fop();
    row["t_hm"] = st.t_hm;
    row["demand"] = {{"ft", st.demand.ft},     {"discard", st.demand.discard}, {"transpose", st.demand.transpose},
                     {"reorder", st.demand.reorder}, {"fop", st.demand.fop},   {"hm", st.demand.hm}};
    row["fop_bytes"] = st.fop_bytes;
    out["combinations"].push_back(row);
  }
  return out.dump(2) + "\n";
}

TimingSet load_timings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_timings(ss.str());
}

void save_timings(const TimingSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << timings_to_json(set);
}

}  // namespace fdas
