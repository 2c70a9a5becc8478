#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "export.hpp"
#include "mates.hpp"
#include "reconstruct.hpp"
#include "scene.hpp"

namespace framed {

constexpr int kDefaultGrid = 41;
constexpr double kMateFrameTol = 1e-8;
constexpr double kPredictionTol = 1e-6;
constexpr double kComposeTol = 1e-6;
constexpr double kCongruenceTol = 1e-4;

struct RunOptions {
  std::string out_dir = ".";
  std::optional<std::pair<int, int>> grid;  // overrides task and scene grids
  std::optional<double> tol;                // overrides each task's main tolerance
  bool write_files = true;
};

struct TaskReport {
  std::string task;
  std::string label;
  json max_residuals = json::object();
  json tolerances = json::object();
  bool pass = true;
  std::string error;
  std::vector<std::string> files;

  // Record a measured maximum with its tolerance.
  void measure(const std::string& key, double value, double tol) {
    max_residuals[key] = value;
    tolerances[key] = tol;
    if (!(value <= tol)) pass = false;
  }
  void info(const std::string& key, double value) { max_residuals[key] = value; }

  json to_json() const {
    json j = {{"task", task},
              {"label", label},
              {"max_residuals", max_residuals},
              {"tolerances", tolerances},
              {"status", pass ? "pass" : "fail"}};
    if (!error.empty()) j["error"] = error;
    if (!files.empty()) j["files"] = files;
    return j;
  }
};

class Runner {
 public:
  Runner(Scene scene, RunOptions opts) : scene_(std::move(scene)), opts_(std::move(opts)) {}

  const Scene& scene() const { return scene_; }

  TaskReport run_task(const json& t) {
    TaskReport r;
    r.task = t.value("task", "");
    r.label = label_of(t);
    try {
      dispatch(t, r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.error = e.what();
    }
    return r;
  }

  std::vector<TaskReport> run_all() {
    std::vector<TaskReport> out;
    for (const auto& t : scene_.tasks) out.push_back(run_task(t));
    return out;
  }

  void write_summary(const std::vector<TaskReport>& reports, const std::string& name = "summary.json") const {
    if (!opts_.write_files) return;
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(r.to_json());
    std::ofstream out(path(name));
    out << arr.dump(2) << "\n";
  }

 private:
  Scene scene_;
  RunOptions opts_;

  std::string path(const std::string& file) const {
    std::filesystem::create_directories(opts_.out_dir);
    return (std::filesystem::path(opts_.out_dir) / file).string();
  }

  static std::string label_of(const json& t) {
    if (t.contains("name")) return t["name"].get<std::string>();
    std::string l = t.value("task", "task");
    if (t.contains("mate") && !t.contains("pipeline")) return l + "_" + t["mate"].get<std::string>();
    for (const char* key : {"surface", "mate", "fields", "pipeline", "variant"})
      if (t.contains(key)) l += "_" + t[key].get<std::string>();
    return l;
  }

  double tol_or(const json& t, double def) const {
    if (opts_.tol) return *opts_.tol;
    return t.value("tol", def);
  }

  Grid grid_for(const json& t, const Domain& d) const {
    std::pair<int, int> n{kDefaultGrid, kDefaultGrid};
    if (scene_.grid) n = *scene_.grid;
    if (t.contains("grid")) n = {t["grid"][0].get<int>(), t["grid"][1].get<int>()};
    if (opts_.grid) n = *opts_.grid;
    return Grid(d, n.first, n.second);
  }

  const SurfaceDef& surface_of(const json& t) const {
    if (t.contains("surface")) return scene_.surface(t["surface"].get<std::string>());
    if (t.contains("mate")) return scene_.surface(scene_.mate(t["mate"].get<std::string>()).surface);
    if (scene_.surfaces.empty()) throw SchemaError("surfaces", "scene has no surface");
    return scene_.surfaces.front();
  }

  void dispatch(const json& t, TaskReport& r) {
    const std::string& type = r.task;
    if (type == "check") return check(t, r);
    if (type == "invariants") return invariants(t, r);
    if (type == "curvature") return curvature_task(t, r);
    if (type == "caustic" || type == "involute" || type == "tangential" || type == "mate") return mate(t, r);
    if (type == "compose") return compose(t, r);
    if (type == "reconstruct") return reconstruct_task(t, r);
    if (type == "export") return export_task(t, r);
    throw SchemaError("task", "unknown task '" + type + "'");
  }

  void check(const json& t, TaskReport& r) {
    if (t.contains("fields")) {
      const FieldsDef& f = scene_.field_set(t["fields"].get<std::string>());
      Grid g = grid_for(t, f.domain);
      r.measure("integrability", max_integrability_residual(f.fields().eval, g), tol_or(t, kIntegrabilityTol));
      return;
    }
    const SurfaceDef& S = surface_of(t);
    Grid g = grid_for(t, S.domain);
    double frame = 0, integ = 0;
    for (int j = 0; j < g.nv; ++j)
      for (int i = 0; i < g.nu; ++i) {
        frame = std::max(frame, frame_defect(S.eval(g.u(i), g.v(j))));
        integ = std::max(integ, integrability_residuals(S, g.u(i), g.v(j)).max_abs());
      }
    r.measure("frame", frame, kFrameTol);
    r.measure("integrability", integ, tol_or(t, kIntegrabilityTol));
  }

  void invariants(const json& t, TaskReport& r) {
    const SurfaceDef& S = surface_of(t);
    Grid g = grid_for(t, S.domain);
    double frame = 0;
    for (int j = 0; j < g.nv; ++j)
      for (int i = 0; i < g.nu; ++i) frame = std::max(frame, frame_defect(S.eval(g.u(i), g.v(j))));
    r.measure("frame", frame, tol_or(t, kFrameTol));
    if (opts_.write_files) {
      std::string p = path(r.label + ".csv");
      write_invariants_csv(g, sample_invariants(S.field(), g), p);
      r.files.push_back(p);
    }
  }

  void curvature_task(const json& t, TaskReport& r) {
    const SurfaceDef& S = surface_of(t);
    Grid g = grid_for(t, S.domain);
    auto inv = sample_invariants(S.field(), g);
    double tol = tol_or(t, 1e-9);
    std::map<std::string, int> counts;
    double jmax = 0, kmax = 0, hmax = 0;
    for (const auto& b : inv) {
      CurvatureTriple c = framed::curvature(b);
      jmax = std::max(jmax, std::abs(c.J));
      kmax = std::max(kmax, std::abs(c.K));
      hmax = std::max(hmax, std::abs(c.H));
      ++counts[to_string(classify_front(b, tol))];
    }
    r.info("abs_J", jmax);
    r.info("abs_K", kmax);
    r.info("abs_H", hmax);
    for (const auto& [k, n] : counts) r.info("count_" + k, n);
    if (opts_.write_files) {
      std::string p = path(r.label + ".csv");
      write_curvature_csv(g, inv, tol, p);
      r.files.push_back(p);
    }
  }

  void report_mate(const MateResult& m, const json& t, TaskReport& r) {
    r.measure("frame", m.max_frame_defect, kMateFrameTol);
    r.measure("prediction", m.max_prediction_error, kPredictionTol);
    r.measure("condition", m.max_condition, tol_or(t, kGateTol));
    if (kind_is_involute(m.kind)) r.measure("gate", m.max_gate, tol_or(t, kGateTol));
    if (opts_.write_files) {
      std::string obj = path(r.label + ".obj"), csv = path(r.label + "_invariants.csv");
      export_mesh(m.samples, obj);
      write_invariants_csv(m.grid(), m.recomputed, csv);
      r.files.push_back(obj);
      r.files.push_back(csv);
    }
  }

  void mate(const json& t, TaskReport& r) {
    const SurfaceDef& S = surface_of(t);
    Grid g = grid_for(t, S.domain);
    double tol = tol_or(t, kGateTol);
    if (t.contains("mate")) {
      MateSpec spec = scene_.mate(t["mate"].get<std::string>());
      if (r.task == "caustic" && spec.kind != MateKind::NS && spec.kind != MateKind::NT)
        throw SpecError("caustic task needs a mate of kind ns or nt");
      if (r.task == "involute" && !kind_is_involute(spec.kind))
        throw SpecError("involute task needs a mate of kind sn or tn");
      if (r.task == "tangential" && spec.kind != MateKind::ST && spec.kind != MateKind::TS)
        throw SpecError("tangential task needs a mate of kind st or ts");
      if (t.value("solve", false)) spec.lambda.reset();
      MateResult m = construct_mate(spec, S.field(), g, tol);
      // Involutes integrate lambda; a lambda written in the MateSpec is compared with it.
      if (kind_is_involute(spec.kind) && spec.lambda) {
        double d = 0;
        for (int j = 0; j < g.nv; ++j)
          for (int i = 0; i < g.nu; ++i)
            d = std::max(d, std::abs(m.lambda_values[g.index(i, j)] - spec.lambda->eval(g.u(i), g.v(j))));
        r.measure("lambda_spec", d, tol);
      }
      report_mate(m, t, r);
      return;
    }
    if (r.task != "caustic") throw SchemaError("task.mate", "missing");
    Variant var = t.value("variant", "s") == "t" ? Variant::T : Variant::S;
    report_mate(caustic(S.field(), g, var), t, r);
  }

  ComposeParams compose_params(const json& t, const Domain& d) const {
    ComposeParams p;
    if (t.contains("mate")) {
      const MateSpec& m = scene_.mate(t["mate"].get<std::string>());
      if (m.theta) p.theta = *m.theta;
      if (m.lambda) p.lambda = scalar_field(*m.lambda);
      p.c = m.c;
      p.base = m.base;
    }
    if (t.contains("theta")) p.theta = angle_from_json(t["theta"], "task.theta");
    if (t.contains("lambda")) p.lambda = scalar_field(detail::expr_at(t["lambda"], "task.lambda"));
    if (t.contains("c")) p.c = t["c"].get<double>();
    if (t.contains("base")) p.base = detail::pair_at(t["base"], "task.base");
    if (t.contains("lambda2")) p.lambda2 = scalar_field(detail::expr_at(t["lambda2"], "task.lambda2"));
    if (t.contains("theta2")) p.theta2 = angle_from_json(t["theta2"], "task.theta2");
    if (t.contains("expect")) p.expected = scene_.surface(t["expect"].get<std::string>()).field();
    if (!p.base) p.base = std::make_pair(d.u0, d.v0);
    p.tol = t.value("gate_tol", kGateTol);
    return p;
  }

  void compose(const json& t, TaskReport& r) {
    const SurfaceDef& S = surface_of(t);
    Grid g = grid_for(t, S.domain);
    Pipeline p = parse_pipeline(detail::member(t, "pipeline", "task").get<std::string>());
    ComposeReport rep = compose_check(S.field(), g, p, compose_params(t, S.domain));
    double tol = tol_or(t, kComposeTol);
    r.measure("x", rep.dx, tol);
    r.measure("n", rep.dn, tol);
    r.measure("s", rep.ds, tol);
    r.info("stage1_condition", rep.stage1_condition);
    r.info("stage2_condition", rep.stage2_condition);
  }

  void reconstruct_task(const json& t, TaskReport& r) {
    double tol = tol_or(t, kCongruenceTol);
    if (t.contains("fields")) {
      const FieldsDef& f = scene_.field_set(t["fields"].get<std::string>());
      Grid g = grid_for(t, f.domain);
      FramePoint seed{{0, 0, 0}, {0, 0, 1}, {1, 0, 0}};
      if (t.contains("seed")) {
        const json& s = t["seed"];
        auto vec = [&](const char* k) {
          const json& a = detail::member(s, k, "task.seed");
          return Vec3{a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
        };
        seed = {vec("x"), vec("n"), vec("s")};
      }
      ReconstructResult res = reconstruct(f.fields(), seed, g);
      r.measure("step_correction", res.max_correction, kStepCorrectionTol);
      if (t.contains("expect")) {
        SampledSurface ref = sample(scene_.surface(t["expect"].get<std::string>()).field(), g);
        r.measure("congruence", congruence(ref, res.surface).max_error, tol);
      }
      write_obj(res.surface, r);
      return;
    }
    const SurfaceDef& S = surface_of(t);
    Grid g = grid_for(t, S.domain);
    FrameJet b = S.eval(S.domain.u0, S.domain.v0);
    FramePoint seed{b.x.value, b.n.value, b.s.value};
    ReconstructResult res = reconstruct(InvariantFields::of_surface(S.field(), S.domain), seed, g);
    r.measure("step_correction", res.max_correction, kStepCorrectionTol);
    r.measure("congruence", congruence(sample(S.field(), g), res.surface).max_error, tol);
    write_obj(res.surface, r);
  }

  void write_obj(const SampledSurface& s, TaskReport& r) {
    if (!opts_.write_files) return;
    std::string p = path(r.label + ".obj");
    export_mesh(s, p);
    r.files.push_back(p);
  }

  void export_task(const json& t, TaskReport& r) {
    const SurfaceDef& S = surface_of(t);
    Grid g = grid_for(t, S.domain);
    if (t.contains("mate")) {
      MateResult m = construct_mate(scene_.mate(t["mate"].get<std::string>()), S.field(), g, tol_or(t, kGateTol));
      write_obj(m.samples, r);
      return;
    }
    write_obj(sample(S.field(), g), r);
  }
};

}  // namespace framed
