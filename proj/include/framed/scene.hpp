#pragma once

#include <array>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mates.hpp"
#include "reconstruct.hpp"
#include "surface.hpp"

namespace framed {

using json = nlohmann::json;

// Ten invariant fields given as text.
struct FieldsDef {
  std::string name;
  std::array<Expr, 10> e;
  Domain domain;
  InvariantFields fields() const { return InvariantFields::from_exprs(e, domain); }
};

struct Scene {
  std::vector<SurfaceDef> surfaces;
  std::vector<MateSpec> mates;
  std::vector<FieldsDef> fields;
  std::vector<json> tasks;
  std::optional<std::pair<int, int>> grid;
  std::string note;

  const SurfaceDef& surface(const std::string& name) const {
    for (const auto& s : surfaces)
      if (s.name == name) return s;
    throw SchemaError("surfaces", "no surface named '" + name + "'");
  }
  const MateSpec& mate(const std::string& name) const {
    for (const auto& m : mates)
      if (m.name == name) return m;
    throw SchemaError("mates", "no mate named '" + name + "'");
  }
  const FieldsDef& field_set(const std::string& name) const {
    for (const auto& f : fields)
      if (f.name == name) return f;
    throw SchemaError("fields", "no field set named '" + name + "'");
  }
  bool has_surface(const std::string& n) const {
    for (const auto& s : surfaces)
      if (s.name == n) return true;
    return false;
  }
  bool has_mate(const std::string& n) const {
    for (const auto& m : mates)
      if (m.name == n) return true;
    return false;
  }
  bool has_fields(const std::string& n) const {
    for (const auto& f : fields)
      if (f.name == n) return true;
    return false;
  }
};

namespace detail {

inline const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "." + key, "missing");
  return *it;
}

inline std::string expr_text(const json& j, const std::string& path) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return format_number(j.get<double>());
  throw SchemaError(path, "expected an expression string or number");
}

inline Expr expr_at(const json& j, const std::string& path) { return parse(expr_text(j, path)); }

inline double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

inline std::array<Expr, 3> vec_exprs(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw SchemaError(path, "expected an array of 3 expressions");
  return {expr_at(j[0], path + "[0]"), expr_at(j[1], path + "[1]"), expr_at(j[2], path + "[2]")};
}

inline std::pair<double, double> pair_at(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw SchemaError(path, "expected [a, b]");
  return {number_at(j[0], path + "[0]"), number_at(j[1], path + "[1]")};
}

inline Domain domain_at(const json& j, const std::string& path) {
  Domain d;
  auto [u0, u1] = pair_at(member(j, "u", path), path + ".u");
  auto [v0, v1] = pair_at(member(j, "v", path), path + ".v");
  d.u_min = u0;
  d.u_max = u1;
  d.v_min = v0;
  d.v_max = v1;
  d.u0 = 0.5 * (u0 + u1);
  d.v0 = 0.5 * (v0 + v1);
  if (j.contains("base")) std::tie(d.u0, d.v0) = pair_at(j["base"], path + ".base");
  try {
    d.validate();
  } catch (const SpecError& e) {
    throw SchemaError(path, e.what());
  }
  return d;
}

inline json domain_json(const Domain& d) {
  return {{"u", {d.u_min, d.u_max}}, {"v", {d.v_min, d.v_max}}, {"base", {d.u0, d.v0}}};
}

}  // namespace detail

inline AngleField angle_from_json(const json& j, const std::string& path) {
  if (j.is_object()) {
    return AngleField(detail::expr_at(detail::member(j, "sin", path), path + ".sin"),
                      detail::expr_at(detail::member(j, "cos", path), path + ".cos"));
  }
  return AngleField(detail::expr_at(j, path));
}

inline json angle_to_json(const AngleField& a) {
  if (a.expr()) return a.expr()->to_string();
  if (a.sin_cos()) return {{"sin", a.sin_cos()->first.to_string()}, {"cos", a.sin_cos()->second.to_string()}};
  throw SpecError("angle field '" + a.describe() + "' has no text form");
}

inline SurfaceDef surface_from_json(const json& j, const std::string& path) {
  SurfaceDef S;
  const json& nm = detail::member(j, "name", path);
  if (!nm.is_string()) throw SchemaError(path + ".name", "expected a string");
  S.name = nm.get<std::string>();
  S.x = detail::vec_exprs(detail::member(j, "x", path), path + ".x");
  S.n = detail::vec_exprs(detail::member(j, "n", path), path + ".n");
  S.s = detail::vec_exprs(detail::member(j, "s", path), path + ".s");
  S.domain = detail::domain_at(detail::member(j, "domain", path), path + ".domain");
  return S;
}

inline MateSpec mate_from_json(const json& j, const std::string& path) {
  MateSpec m;
  m.name = detail::member(j, "name", path).get<std::string>();
  m.surface = detail::member(j, "surface", path).get<std::string>();
  const json& k = detail::member(j, "kind", path);
  try {
    m.kind = parse_mate_kind(k.get<std::string>());
  } catch (const SpecError& e) {
    throw SchemaError(path + ".kind", e.what());
  }
  if (j.contains("lambda")) m.lambda = detail::expr_at(j["lambda"], path + ".lambda");
  if (j.contains("theta")) m.theta = angle_from_json(j["theta"], path + ".theta");
  if (j.contains("base")) m.base = detail::pair_at(j["base"], path + ".base");
  if (j.contains("c")) m.c = detail::number_at(j["c"], path + ".c");
  return m;
}

inline FieldsDef fields_from_json(const json& j, const std::string& path) {
  FieldsDef f;
  f.name = detail::member(j, "name", path).get<std::string>();
  for (std::size_t k = 0; k < 10; ++k) {
    std::string key = BasicInvariants::names[k];
    f.e[k] = detail::expr_at(detail::member(j, key, path), path + "." + key);
  }
  f.domain = detail::domain_at(detail::member(j, "domain", path), path + ".domain");
  return f;
}

inline json to_json(const SurfaceDef& S) {
  auto vec = [](const std::array<Expr, 3>& a) {
    return json::array({a[0].to_string(), a[1].to_string(), a[2].to_string()});
  };
  return {{"name", S.name}, {"x", vec(S.x)}, {"n", vec(S.n)}, {"s", vec(S.s)}, {"domain", detail::domain_json(S.domain)}};
}

inline json to_json(const MateSpec& m) {
  json j = {{"name", m.name}, {"surface", m.surface}, {"kind", to_string(m.kind)}};
  if (m.lambda) j["lambda"] = m.lambda->to_string();
  if (m.theta) j["theta"] = angle_to_json(*m.theta);
  if (m.base) j["base"] = {m.base->first, m.base->second};
  if (m.c != 0 || kind_is_involute(m.kind)) j["c"] = m.c;
  return j;
}

inline json to_json(const FieldsDef& f) {
  json j = {{"name", f.name}};
  for (std::size_t k = 0; k < 10; ++k) j[BasicInvariants::names[k]] = f.e[k].to_string();
  j["domain"] = detail::domain_json(f.domain);
  return j;
}

inline json to_json(const Scene& sc) {
  json j;
  if (!sc.note.empty()) j["note"] = sc.note;
  if (sc.grid) j["grid"] = {sc.grid->first, sc.grid->second};
  j["surfaces"] = json::array();
  for (const auto& s : sc.surfaces) j["surfaces"].push_back(to_json(s));
  j["mates"] = json::array();
  for (const auto& m : sc.mates) j["mates"].push_back(to_json(m));
  if (!sc.fields.empty()) {
    j["fields"] = json::array();
    for (const auto& f : sc.fields) j["fields"].push_back(to_json(f));
  }
  j["tasks"] = sc.tasks;
  return j;
}

inline const std::set<std::string>& task_types() {
  static const std::set<std::string> t = {"check",   "invariants", "curvature", "caustic", "involute", "tangential",
                                          "compose", "reconstruct", "export",   "mate"};
  return t;
}

// Parse, resolve references and spot check every surface frame at its base point.
inline Scene parse_scene(const json& j) {
  Scene sc;
  if (!j.is_object()) throw SchemaError("$", "expected an object");
  if (j.contains("note")) sc.note = j["note"].get<std::string>();
  if (j.contains("grid")) {
    auto [a, b] = detail::pair_at(j["grid"], "grid");
    if (a < 2 || b < 2) throw SchemaError("grid", "needs at least 2 samples per direction");
    sc.grid = std::make_pair(static_cast<int>(a), static_cast<int>(b));
  }
  const json& surfs = detail::member(j, "surfaces", "$");
  if (!surfs.is_array()) throw SchemaError("surfaces", "expected an array");
  std::set<std::string> names;
  for (std::size_t k = 0; k < surfs.size(); ++k) {
    std::string path = "surfaces[" + std::to_string(k) + "]";
    sc.surfaces.push_back(surface_from_json(surfs[k], path));
    if (!names.insert(sc.surfaces.back().name).second) throw SchemaError(path + ".name", "duplicate name");
  }
  if (j.contains("mates")) {
    const json& ms = j["mates"];
    for (std::size_t k = 0; k < ms.size(); ++k) {
      std::string path = "mates[" + std::to_string(k) + "]";
      sc.mates.push_back(mate_from_json(ms[k], path));
      if (!sc.has_surface(sc.mates.back().surface))
        throw SchemaError(path + ".surface", "undefined surface '" + sc.mates.back().surface + "'");
    }
  }
  if (j.contains("fields")) {
    const json& fs = j["fields"];
    for (std::size_t k = 0; k < fs.size(); ++k) sc.fields.push_back(fields_from_json(fs[k], "fields[" + std::to_string(k) + "]"));
  }
  if (j.contains("tasks")) {
    const json& ts = j["tasks"];
    if (!ts.is_array()) throw SchemaError("tasks", "expected an array");
    for (std::size_t k = 0; k < ts.size(); ++k) {
      std::string path = "tasks[" + std::to_string(k) + "]";
      const json& t = ts[k];
      std::string type = detail::member(t, "task", path).get<std::string>();
      if (!task_types().count(type)) throw SchemaError(path + ".task", "unknown task '" + type + "'");
      for (const char* key : {"surface", "expect"})
        if (t.contains(key) && !sc.has_surface(t[key].get<std::string>()))
          throw SchemaError(path + "." + key, "undefined surface '" + t[key].get<std::string>() + "'");
      if (t.contains("mate") && !sc.has_mate(t["mate"].get<std::string>()))
        throw SchemaError(path + ".mate", "undefined mate '" + t["mate"].get<std::string>() + "'");
      if (t.contains("fields") && !sc.has_fields(t["fields"].get<std::string>()))
        throw SchemaError(path + ".fields", "undefined field set '" + t["fields"].get<std::string>() + "'");
      sc.tasks.push_back(t);
    }
  }
  for (const auto& S : sc.surfaces) require_frame(S.eval(S.domain.u0, S.domain.v0), S.domain.u0, S.domain.v0, kFrameTol);
  return sc;
}

inline Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path, "cannot open file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path, e.what());
  }
  try {
    return parse_scene(j);
  } catch (const json::type_error& e) {
    throw SchemaError(path, e.what());
  }
}

inline void write_scene(const Scene& sc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << to_json(sc).dump(2) << "\n";
}

}  // namespace framed
