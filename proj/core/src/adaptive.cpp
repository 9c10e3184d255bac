#include "plap/adaptive.hpp"

#include "plap/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace plap {

void AdaptiveConfig::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("rho must be positive");
  if (!(doerfler_theta > 0.0 && doerfler_theta < 1.0)) throw DomainError("theta must lie in (0, 1)");
  if (!(eps_plus_factor > 1.0)) throw DomainError("eps_plus_factor must exceed 1");
  if (!(eps_minus_factor > 0.0 && eps_minus_factor < 1.0)) throw DomainError("eps_minus_factor must lie in (0, 1)");
  if (!(stop_tolerance >= 0.0)) throw DomainError("stop_tolerance must be >= 0");
  if (max_rounds < 0) throw DomainError("max_rounds must be >= 0");
  if (max_ndof_accumulated < 0) throw DomainError("max_ndof_accumulated must be >= 0");
  if (max_vertices < 0) throw DomainError("max_vertices must be >= 0");
  RelaxInterval(initial_eps_minus, initial_eps_plus);
}

std::vector<int> doerfler_mark(std::span<const double> per_element, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("Doerfler theta must lie in (0, 1)");
  double total = 0.0;
  for (double x : per_element) {
    if (x < 0.0 || !std::isfinite(x)) throw DomainError("Doerfler marking needs finite nonnegative values");
    total += x;
  }
  std::vector<int> marked;
  if (total == 0.0) return marked;
  std::vector<int> order(per_element.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return per_element[a] > per_element[b]; });
  const double target = theta * total;
  double mass = 0.0;
  for (int t : order) {
    marked.push_back(t);
    mass += per_element[t];
    if (mass >= target) break;
  }
  return marked;
}

namespace {

void check_related(const Mesh& old_mesh, const Mesh& new_mesh) {
  if (new_mesh.id() == old_mesh.id()) return;
  if (new_mesh.parent_id() != old_mesh.id() || new_mesh.parent_triangle_count() != old_mesh.n_triangles()) {
    throw TransferError("target mesh was not refined from the source mesh");
  }
}

template <class T>
std::vector<T> inject(const Mesh& old_mesh, const Mesh& new_mesh, const std::vector<T>& values) {
  check_related(old_mesh, new_mesh);
  if (static_cast<int>(values.size()) != old_mesh.n_triangles()) {
    throw TransferError("field does not live on the source mesh");
  }
  if (new_mesh.id() == old_mesh.id()) return values;
  std::vector<T> out;
  out.reserve(new_mesh.n_triangles());
  for (const Triangle& tri : new_mesh.triangles()) {
    if (!tri.parent) throw TransferError("refined triangle without parent");
    out.push_back(values[*tri.parent]);
  }
  return out;
}

}  // namespace

P0VectorField transfer_sigma(const Mesh& old_mesh, const Mesh& new_mesh, const P0VectorField& sigma) {
  return {inject(old_mesh, new_mesh, sigma.values)};
}

SourceTerm transfer_source(const Mesh& old_mesh, const Mesh& new_mesh, const SourceTerm& f) {
  return {inject(old_mesh, new_mesh, f.values)};
}

P1Function prolongate(const Mesh& old_mesh, const Mesh& new_mesh, const P1Function& u) {
  check_related(old_mesh, new_mesh);
  if (u.values.size() != old_mesh.n_vertices()) throw TransferError("function does not live on the source mesh");
  if (new_mesh.id() == old_mesh.id()) return u;
  P1Function out = P1Function::zero(new_mesh);
  out.values.head(old_mesh.n_vertices()) = u.values;
  const auto created = new_mesh.created_vertex_parents();
  for (std::size_t k = 0; k < created.size(); ++k) {
    const int v = old_mesh.n_vertices() + static_cast<int>(k);
    if (!new_mesh.is_dirichlet(v)) out.values[v] = 0.5 * (out.values[created[k][0]] + out.values[created[k][1]]);
  }
  return out;
}

Action choose_action(const IndicatorReport& r, bool refine_allowed) {
  const double h = refine_allowed ? r.eta_h_sq : -std::numeric_limits<double>::infinity();
  const double plus = r.eta_eps_plus_sq;
  const double minus = r.eta_eps_minus_sq;
  const double gap = r.eta_kacanov_sq;
  if (plus >= minus && plus >= h && plus >= gap) return Action::eps_plus;
  if (minus >= h && minus >= gap) return Action::eps_minus;
  if (h >= gap) return Action::refine;
  return Action::kacanov;
}

AdaptiveResult adaptive_loop(const Mesh& mesh, const SourceTerm& f, const Exponents& exps,
                             const AdaptiveConfig& cfg, const RecordObserver& observer) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  RelaxInterval eps(cfg.initial_eps_minus, cfg.initial_eps_plus);
  AdaptiveResult res{{}, std::make_shared<const Mesh>(mesh), f, initial_state(mesh, f, eps, exps), false};
  auto solver = std::make_unique<KacanovSolver>(*res.mesh, res.f, exps);
  long long acc = res.mesh->n_free();

  auto record = [&](ConvergenceRecord r) {
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.history.push_back(r);
    if (observer) observer(res.history.back());
  };
  record(make_record(*res.mesh, res.f, exps, res.state, acc));

  for (int round = 0; round < cfg.max_rounds; ++round) {
    res.state = solver->step(res.state, eps);
    acc += res.mesh->n_free();
    const IndicatorReport rep = compute_indicators(*res.mesh, res.state, res.f, exps, cfg.rho, cfg.refine_mesh);
    const Action action = choose_action(rep, cfg.refine_mesh);

    ConvergenceRecord row = make_record(*res.mesh, res.f, exps, res.state, acc);
    row.eta_eps_plus_sq = rep.eta_eps_plus_sq;
    row.eta_eps_minus_sq = rep.eta_eps_minus_sq;
    row.eta_h_sq = cfg.refine_mesh ? rep.eta_h_sq : std::numeric_limits<double>::quiet_NaN();
    row.action = action;
    record(row);

    const double surrogate = rep.eta_eps_plus_sq + rep.eta_eps_minus_sq + rep.eta_kacanov_sq + rep.eta_h_sq;
    if (surrogate <= cfg.stop_tolerance) {
      res.converged = true;
      break;
    }
    if (cfg.max_ndof_accumulated > 0 && acc >= cfg.max_ndof_accumulated) break;
    if (cfg.max_vertices > 0 && res.mesh->n_vertices() >= cfg.max_vertices) break;

    switch (action) {
      case Action::eps_plus:
        eps = RelaxInterval(eps.eps_minus(), cfg.eps_plus_factor * eps.eps_plus());
        break;
      case Action::eps_minus:
        eps = RelaxInterval(cfg.eps_minus_factor * eps.eps_minus(), eps.eps_plus());
        break;
      case Action::refine: {
        const std::vector<int> marked = doerfler_mark(rep.per_element_eta_h_sq, cfg.doerfler_theta);
        auto refined = std::make_shared<const Mesh>(bisect(*res.mesh, marked));
        P0VectorField sigma = transfer_sigma(*res.mesh, *refined, res.state.sigma);
        P1Function u = prolongate(*res.mesh, *refined, res.state.u);
        res.f = transfer_source(*res.mesh, *refined, res.f);
        solver.reset();
        res.mesh = std::move(refined);
        res.state = make_state(*res.mesh, res.f, eps, exps, std::move(u), std::move(sigma), res.state.iteration);
        solver = std::make_unique<KacanovSolver>(*res.mesh, res.f, exps);
        break;
      }
      case Action::kacanov:
      case Action::descent:
        break;
    }
  }
  return res;
}

}  // namespace plap
