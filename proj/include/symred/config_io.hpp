#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "symred/rep.hpp"

namespace symred {

using nlohmann::json;

inline bool operator==(const RepSpec& a, const RepSpec& b) {
  return a.kind == b.kind && a.mode == b.mode && a.n == b.n && a.d == b.d && a.weights == b.weights &&
         a.level == b.level && a.spins == b.spins;
}

inline json level_to_json(const Rat& r) {
  if (r.is_integer()) return json(r.num());
  return json(r.str());
}

inline Rat level_from_json(const json& j) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (j.is_string()) return Rat::parse(j.get<std::string>());
  throw malformed_config("level entries must be integers or 'p/q' strings");
}

inline json rep_to_json(const RepSpec& rep) {
  json j;
  j["kind"] = rep.kind == GroupKind::Torus ? "torus" : "su2";
  j["mode"] = rep.mode == PhaseMode::Affine ? "affine" : "projective";
  if (rep.kind == GroupKind::Torus) {
    j["weights"] = rep.weights;
    json lv = json::array();
    for (const Rat& l : rep.level) lv.push_back(level_to_json(l));
    j["level"] = lv;
  } else {
    j["spins"] = rep.spins;
    j["level"] = 0;
  }
  return j;
}

inline RepSpec rep_from_json(const json& j) {
  if (!j.is_object()) throw malformed_config("config must be a JSON object");
  std::string kind = j.value("kind", "");
  std::string mode_s = j.value("mode", "affine");
  PhaseMode mode;
  if (mode_s == "affine")
    mode = PhaseMode::Affine;
  else if (mode_s == "projective")
    mode = PhaseMode::Projective;
  else
    throw malformed_config("mode must be 'affine' or 'projective'");
  if (kind == "torus") {
    if (!j.contains("weights") || !j["weights"].is_array()) throw malformed_config("torus config needs 'weights'");
    std::vector<std::vector<long long>> w;
    for (const auto& row : j["weights"]) {
      std::vector<long long> r;
      for (const auto& e : row) {
        if (!e.is_number_integer()) throw malformed_config("weights must be integers");
        r.push_back(e.get<long long>());
      }
      w.push_back(std::move(r));
    }
    ratvec level;
    if (j.contains("level")) {
      if (!j["level"].is_array()) throw malformed_config("torus level must be an array");
      for (const auto& e : j["level"]) level.push_back(level_from_json(e));
    }
    return build_torus_rep(std::move(w), mode, std::move(level));
  }
  if (kind == "su2") {
    if (!j.contains("spins") || !j["spins"].is_array()) throw malformed_config("su2 config needs 'spins'");
    std::vector<int> spins;
    for (const auto& e : j["spins"]) {
      if (!e.is_number_integer()) throw malformed_config("spins must be integers");
      spins.push_back(e.get<int>());
    }
    if (j.contains("level")) {
      const auto& l = j["level"];
      bool zero = (l.is_number_integer() && l.get<long long>() == 0) ||
                  (l.is_array() && l.empty());
      if (!zero) throw malformed_config("nonzero su2 levels are not supported");
    }
    return build_su2_rep(std::move(spins), mode);
  }
  throw malformed_config("kind must be 'torus' or 'su2'");
}

inline RepSpec rep_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw malformed_config("cannot open rep config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw malformed_config(std::string("bad JSON: ") + e.what());
  }
  return rep_from_json(j);
}

// Canonical serialization (nlohmann objects iterate in key order) and the
// FNV-1a hash embedded in every report.
inline std::string canonical_config(const RepSpec& rep) { return rep_to_json(rep).dump(); }

inline std::string config_hash(const RepSpec& rep) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : canonical_config(rep)) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

// States parse from arrays of [re, im] pairs (or plain reals).
inline cvec state_from_json(const json& j) {
  if (!j.is_array()) throw malformed_config("state must be a JSON array");
  cvec v;
  for (const auto& e : j) {
    if (e.is_array() && e.size() == 2)
      v.push_back(complexd(e[0].get<double>(), e[1].get<double>()));
    else if (e.is_number())
      v.push_back(complexd(e.get<double>(), 0.0));
    else
      throw malformed_config("state entries must be numbers or [re, im] pairs");
  }
  return v;
}

inline cvec state_from_string(const std::string& s) {
  json j;
  try {
    j = json::parse(s);
  } catch (const json::exception& e) {
    throw malformed_config(std::string("bad state JSON: ") + e.what());
  }
  return state_from_json(j);
}

inline json state_to_json(const cvec& v) {
  json j = json::array();
  for (const auto& z : v) j.push_back({z.real(), z.imag()});
  return j;
}

}  // namespace symred
