#include "plap/experiment.hpp"

#include "plap/error.hpp"
#include "plap/parallel.hpp"
#include "plap/vtk.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace plap {

Mesh initial_mesh(const RunConfig& cfg) {
  Mesh mesh = cfg.domain == Domain::disk ? make_unit_disk_mesh(cfg.disk_boundary_vertices) : make_lshape_mesh();
  return refine_uniform(std::move(mesh), cfg.mesh_resolution);
}

namespace {

ExperimentOutput from_state(std::shared_ptr<const Mesh> mesh, SourceTerm f, const KacanovState& s,
                            std::vector<ConvergenceRecord> history, bool converged) {
  ExperimentOutput out;
  out.history = std::move(history);
  out.mesh = std::move(mesh);
  out.f = std::move(f);
  out.u = s.u;
  out.sigma = s.sigma;
  out.converged = converged;
  return out;
}

std::string csv(const std::vector<ConvergenceRecord>& rows, bool wall_time) {
  std::ostringstream os;
  if (wall_time) {
    write_history_csv(os, rows);
  } else {
    std::vector<ConvergenceRecord> copy = rows;
    for (auto& r : copy) r.wall_time = 0.0;
    write_history_csv(os, copy);
  }
  return os.str();
}

}  // namespace

ExperimentOutput run_experiment(const RunConfig& cfg, const RecordObserver& observer) {
  cfg.validate();
  set_num_threads(cfg.threads);
  const Exponents exps(cfg.p);
  auto mesh = std::make_shared<const Mesh>(initial_mesh(cfg));
  SourceTerm f = SourceTerm::constant(*mesh, cfg.f);

  switch (cfg.mode) {
    case Mode::schedule: {
      ScheduleConfig sched = cfg.schedule();
      KacanovRun run = run_fixed_schedule(*mesh, f, exps, sched, observer);
      return from_state(mesh, f, run.final_state, std::move(run.history), true);
    }
    case Mode::fixed_interval: {
      const RelaxInterval eps(cfg.eps_minus, cfg.eps_plus);
      KacanovRun run = run_fixed_interval(*mesh, f, exps, eps, cfg.gap_tolerance, cfg.max_iterations, std::nullopt,
                                          observer);
      return from_state(mesh, f, run.final_state, std::move(run.history), run.converged);
    }
    case Mode::adaptive: {
      AdaptiveResult run = adaptive_loop(*mesh, f, exps, cfg.adaptive, observer);
      return from_state(run.mesh, run.f, run.state, std::move(run.history), run.converged);
    }
    case Mode::steepest_compare: {
      AdaptiveConfig gen = cfg.adaptive;
      gen.max_vertices = cfg.target_vertices;
      AdaptiveResult meshing = adaptive_loop(*mesh, f, exps, gen);
      mesh = meshing.mesh;
      f = meshing.f;
      const RelaxInterval eps(cfg.eps_minus, cfg.eps_plus);
      KacanovRun run = run_fixed_interval(*mesh, f, exps, eps, cfg.gap_tolerance, cfg.max_iterations,
                                          poisson_initializer(*mesh, f, eps, exps), observer);
      ExperimentOutput out = from_state(mesh, f, run.final_state, std::move(run.history), run.converged);
      BaselineConfig base = cfg.baseline;
      base.max_iterations = cfg.max_iterations;
      DescentRun descent = run_steepest_descent(*mesh, f, exps, base);
      out.baseline_history = std::move(descent.history);
      out.baseline_stop = descent.stop;
      return out;
    }
  }
  throw ConfigError("unhandled mode", 0);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + tmp.string());
    os << content;
    os.flush();
    if (!os) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_outputs(const RunConfig& cfg, const ExperimentOutput& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "history.csv", csv(out.history, cfg.wall_time));
  if (cfg.mode == Mode::steepest_compare) {
    write_file_atomic(dir / "history_steepest.csv", csv(out.baseline_history, cfg.wall_time));
  }
  std::ostringstream vtk;
  write_vtk(vtk, *out.mesh, out.u, out.sigma);
  write_file_atomic(dir / "solution.vtk", vtk.str());

  std::ostringstream manifest;
  manifest << "# plap run manifest; parseable as a config file\n"
           << serialize_config(cfg)
           << "# vertices: " << out.mesh->n_vertices() << '\n'
           << "# triangles: " << out.mesh->n_triangles() << '\n'
           << "# rows: " << out.history.size() << '\n'
           << "# converged: " << (out.converged ? "true" : "false") << '\n';
  if (out.baseline_stop) manifest << "# baseline_stop: " << to_string(*out.baseline_stop) << '\n';
  write_file_atomic(dir / "manifest.txt", manifest.str());
}

ExperimentOutput run_and_write(const RunConfig& cfg, const std::filesystem::path& dir) {
  std::vector<ConvergenceRecord> partial;
  try {
    ExperimentOutput out = run_experiment(cfg, [&](const ConvergenceRecord& r) { partial.push_back(r); });
    write_outputs(cfg, out, dir);
    return out;
  } catch (const SolverError&) {
    std::filesystem::create_directories(dir);
    write_file_atomic(dir / "history.csv", csv(partial, cfg.wall_time));
    throw;
  }
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

double energy_scale(const std::vector<ConvergenceRecord>& h) {
  double s = 1.0;
  for (const auto& r : h) {
    if (std::isfinite(r.dual_energy_relaxed)) s = std::max(s, std::abs(r.dual_energy_relaxed));
  }
  return s;
}

}  // namespace

std::vector<CheckResult> verify_experiment(const RunConfig& cfg, const ExperimentOutput& out) {
  std::vector<CheckResult> checks;
  const auto& h = out.history;
  const double scale = energy_scale(h);

  {
    bool ok = !h.empty();
    long long acc = 0;
    for (std::size_t i = 0; i < h.size() && ok; ++i) {
      acc += h[i].ndof;
      ok = h[i].ndof_accumulated == acc && (i == 0 || h[i].iteration > h[i - 1].iteration);
    }
    checks.push_back({"history bookkeeping", ok, std::to_string(h.size()) + " rows"});
  }
  {
    double worst = 0.0;
    for (std::size_t i = 1; i < h.size(); ++i) worst = std::min(worst, h[i].gap / scale);
    checks.push_back({"weak duality", worst >= -1e-12, "min gap/scale " + fmt(worst)});
  }
  {
    const double res = divergence_residual(*out.mesh, out.sigma, out.f);
    const double load = restrict_to_free(*out.mesh, assemble_load(*out.mesh, out.f)).cwiseAbs().maxCoeff();
    checks.push_back({"final stress feasible", h.size() < 2 || res <= 1e-9 * std::max(load, 1e-300) + 1e-14,
                      "residual " + fmt(res)});
  }
  if (cfg.mode == Mode::fixed_interval || cfg.mode == Mode::steepest_compare) {
    checks.push_back({"gap tolerance reached", out.converged,
                      "final gap " + fmt(h.back().gap) + " after " + std::to_string(h.size() - 1) + " steps"});
    bool mono = true;
    for (std::size_t i = 2; i < h.size(); ++i) {
      mono = mono && h[i].gap <= h[i - 1].gap * (1.0 + 1e-8) + 1e-14 * scale;
    }
    checks.push_back({"gap nonincreasing", mono, ""});
  }
  if (cfg.mode == Mode::schedule) {
    bool ok = true;
    for (std::size_t i = 1; i < h.size(); ++i) {
      ok = ok && h[i].eps_minus <= h[i - 1].eps_minus && h[i].eps_plus >= h[i - 1].eps_plus;
    }
    checks.push_back({"interval widens", ok, ""});
  }
  if (cfg.mode == Mode::adaptive) {
    bool eps_ok = true;
    bool nonneg = true;
    bool argmax = true;
    for (std::size_t i = 1; i < h.size(); ++i) {
      const auto& r = h[i];
      eps_ok = eps_ok && r.eps_minus <= h[i - 1].eps_minus && r.eps_plus >= h[i - 1].eps_plus;
      IndicatorReport rep;
      rep.eta_eps_plus_sq = r.eta_eps_plus_sq;
      rep.eta_eps_minus_sq = r.eta_eps_minus_sq;
      rep.eta_kacanov_sq = r.gap;
      rep.eta_h_sq = cfg.adaptive.refine_mesh ? r.eta_h_sq : 0.0;
      nonneg = nonneg && r.eta_eps_plus_sq >= 0.0 && r.eta_eps_minus_sq >= 0.0 &&
               (!cfg.adaptive.refine_mesh || r.eta_h_sq >= 0.0) && r.gap >= -1e-12 * scale;
      argmax = argmax && choose_action(rep, cfg.adaptive.refine_mesh) == r.action;
    }
    checks.push_back({"interval monotone", eps_ok, ""});
    checks.push_back({"indicators nonnegative", nonneg, ""});
    checks.push_back({"action is argmax", argmax, ""});
  }
  if (cfg.mode == Mode::steepest_compare) {
    const auto& b = out.baseline_history;
    bool mono = !b.empty();
    for (std::size_t i = 1; i < b.size(); ++i) {
      mono = mono && b[i].primal_energy_unrelaxed <= b[i - 1].primal_energy_unrelaxed;
    }
    checks.push_back({"descent energy nonincreasing", mono,
                      std::to_string(b.size()) + " rows, stop " +
                          std::string(out.baseline_stop ? to_string(*out.baseline_stop) : "none")});
  }
  return checks;
}

}  // namespace plap
