// Command-line front end: load a scene, run tasks, write reports and meshes.
#include <cstdio>
#include <iostream>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "framed/framed.hpp"

using namespace framed;

namespace {

void print_report(const TaskReport& r) {
  std::cout << (r.pass ? "[pass] " : "[FAIL] ") << r.task << " " << r.label;
  for (auto it = r.max_residuals.begin(); it != r.max_residuals.end(); ++it) {
    std::cout << "  " << it.key() << "=" << it.value().dump();
    if (r.tolerances.contains(it.key())) std::cout << " (tol " << r.tolerances[it.key()].dump() << ")";
  }
  if (!r.error.empty()) std::cout << "  error: " << r.error;
  std::cout << "\n";
}

std::pair<int, int> parse_grid(const std::string& s) {
  std::smatch m;
  static const std::regex re(R"((\d+)[xX](\d+))");
  if (!std::regex_match(s, m, re)) throw CLI::ValidationError("--grid", "expected NUxNV, e.g. 41x41");
  return {std::stoi(m[1]), std::stoi(m[2])};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Framed surfaces: invariants, Bertrand mates, caustics, involutes, reconstruction"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string scene_path, out_dir = "out", grid_text;
  std::optional<double> tol;
  app.add_option("--scene", scene_path, "scene JSON file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--grid", grid_text, "sample grid NUxNV (overrides scene and task grids)");
  app.add_option("--tol", tol, "override the main tolerance of each task");

  std::string surface, fields, kind, name, pipeline, variant = "s";
  auto* check = app.add_subcommand("check", "frame and integrability residuals over the grid");
  auto* invariants = app.add_subcommand("invariants", "basic invariants table (CSV)");
  auto* curvature = app.add_subcommand("curvature", "curvature triple and front classification (CSV)");
  auto* mate = app.add_subcommand("mate", "construct a Bertrand mate");
  auto* compose = app.add_subcommand("compose", "check a composition identity");
  auto* reconstruct = app.add_subcommand("reconstruct", "integrate a surface from invariants and test congruence");
  auto* exporter = app.add_subcommand("export", "write an OBJ mesh");
  auto* run = app.add_subcommand("run", "run every task listed in the scene");

  for (auto* sc : {check, invariants, curvature, mate, compose, reconstruct, exporter})
    sc->add_option("--surface", surface, "surface name (default: all or first)");
  for (auto* sc : {check, reconstruct}) sc->add_option("--fields", fields, "invariant field set name");
  mate->add_option("--kind", kind, "mate kind")
      ->check(CLI::IsMember({"nn", "ns", "nt", "sn", "ss", "st", "tn", "ts", "tt"}));
  mate->add_option("--variant", variant, "caustic variant when solving")->check(CLI::IsMember({"s", "t"}));
  for (auto* sc : {mate, compose, exporter}) sc->add_option("--name", name, "mate spec name");
  compose->add_option("--pipeline", pipeline, "CsIs, IsCs, TsSt, StTs, CtIt or ItCt")->required();

  CLI11_PARSE(app, argc, argv);

  RunOptions opts;
  opts.out_dir = out_dir;
  opts.tol = tol;
  std::optional<Scene> scene;
  try {
    if (!grid_text.empty()) opts.grid = parse_grid(grid_text);
    scene = load_scene(scene_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  std::vector<json> tasks;
  auto per_surface = [&](const std::string& type) {
    if (!fields.empty()) {
      tasks.push_back({{"task", type}, {"fields", fields}});
      return;
    }
    if (!surface.empty()) {
      tasks.push_back({{"task", type}, {"surface", surface}});
      return;
    }
    for (const auto& s : scene->surfaces) tasks.push_back({{"task", type}, {"surface", s.name}});
  };
  try {
    if (run->parsed()) {
      tasks = scene->tasks;
    } else if (check->parsed()) {
      per_surface("check");
    } else if (invariants->parsed()) {
      per_surface("invariants");
    } else if (curvature->parsed()) {
      per_surface("curvature");
    } else if (mate->parsed()) {
      if (!name.empty()) {
        const MateSpec& m = scene->mate(name);
        if (!kind.empty() && parse_mate_kind(kind) != m.kind)
          throw SpecError("mate '" + name + "' is of kind " + to_string(m.kind) + ", not " + kind);
        tasks.push_back({{"task", "mate"}, {"mate", name}});
      } else if (kind == "ns" || kind == "nt") {
        json t = {{"task", "caustic"}, {"variant", kind == "ns" ? "s" : "t"}};
        if (!surface.empty()) t["surface"] = surface;
        tasks.push_back(t);
      } else if (!kind.empty()) {
        for (const auto& m : scene->mates)
          if (to_string(m.kind) == kind && (surface.empty() || m.surface == surface))
            tasks.push_back({{"task", "mate"}, {"mate", m.name}});
        if (tasks.empty()) throw SpecError("no mate spec of kind " + kind + " in the scene");
      } else {
        throw SpecError("mate needs --name or --kind");
      }
    } else if (compose->parsed()) {
      json t = {{"task", "compose"}, {"pipeline", pipeline}};
      if (!surface.empty()) t["surface"] = surface;
      if (!name.empty()) t["mate"] = name;
      tasks.push_back(t);
    } else if (reconstruct->parsed()) {
      per_surface("reconstruct");
    } else if (exporter->parsed()) {
      json t = {{"task", "export"}};
      if (!surface.empty()) t["surface"] = surface;
      if (!name.empty()) t["mate"] = name;
      tasks.push_back(t);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  Runner runner(*scene, opts);
  std::vector<TaskReport> reports;
  bool ok = true;
  for (const auto& t : tasks) {
    reports.push_back(runner.run_task(t));
    print_report(reports.back());
    ok = ok && reports.back().pass;
  }
  runner.write_summary(reports);
  return ok ? 0 : 1;
}
