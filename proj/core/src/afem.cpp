#include "fracocp/afem.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <deque>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fracocp {

std::vector<int> dorfler_mark(const IndicatorField& indicators, double theta) {
  if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("dorfler_mark: theta must lie in [0,1]");
  const Eigen::VectorXd& v = indicators.values;
  const int n = static_cast<int>(v.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return v[a] > v[b]; });
  const double total = v.sum();
  const double target = theta * theta * total;
  std::vector<int> marked;
  if (theta == 1.0) {
    for (int e : order)
      if (v[e] > 0) marked.push_back(e);
    std::sort(marked.begin(), marked.end());
    return marked;
  }
  double sum = 0.0;
  for (int e : order) {
    if (sum >= target) break;
    marked.push_back(e);
    sum += v[e];
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

namespace {

bool touches_boundary(const Mesh& m, int e) {
  const auto& t = m.elements[e];
  return m.boundary[t[0]] || m.boundary[t[1]] || m.boundary[t[2]];
}

std::vector<int> composed_parent(const std::deque<RefineResult>& chain) {
  std::vector<int> parent = chain.back().parent;
  for (auto it = chain.rbegin() + 1; it != chain.rend(); ++it)
    for (auto& p : parent) p = it->parent[p];
  return parent;
}

// Children inherit the parent's constant; the pointwise control follows the prolongated state and adjoint.
Control transfer_control(const std::deque<RefineResult>& chain, const Mesh& target, const ProblemSpec& spec,
                         Scheme scheme, const OptimizerResult& sol) {
  if (scheme == Scheme::Full) {
    std::vector<int> parent = composed_parent(chain);
    Eigen::VectorXd v(target.num_elements());
    for (int e = 0; e < target.num_elements(); ++e) v[e] = sol.u.values()[parent[e]];
    return Control::piecewise_constant(target, std::move(v));
  }
  FeFunction y = sol.y, z = sol.z;
  for (const auto& r : chain) {
    y = prolongate(y, r);
    z = prolongate(z, r);
  }
  return Control::pointwise(FeFunction(target, y.coeffs), FeFunction(target, z.coeffs), spec.lambda, spec.a, spec.b);
}

}  // namespace

AfemTrace afem_loop(const ProblemSpec& spec, const AfemConfig& cfg) {
  return afem_loop(spec, cfg, initial_mesh(spec.domain, spec.initial_resolution));
}

AfemTrace afem_loop(const ProblemSpec& spec, const AfemConfig& cfg, Mesh initial) {
  spec.validate();
  const KernelParams params = make_kernel_params(spec.s);
  AfemTrace trace;
  trace.scheme = cfg.scheme;
  trace.theta = cfg.uniform ? 1.0 : cfg.theta;

  // controls and FE functions hold pointers into these meshes
  std::vector<std::unique_ptr<Mesh>> meshes;
  meshes.push_back(std::make_unique<Mesh>(std::move(initial)));
  Control u0 = Control::constant(*meshes.back(), 0.5 * (spec.a + spec.b));

  for (int it = 0;; ++it) {
    const Mesh& mesh = *meshes.back();
    Eigen::MatrixXd A = assemble_stiffness(mesh, params, cfg.quadrature);
    OptimizerResult sol =
        projection_gradient_solve(mesh, A, spec, cfg.scheme, u0, cfg.optimizer_tol, cfg.optimizer_max_iter);
    auto [ey, ez] = state_adjoint_indicators(mesh, sol.y, sol.z, sol.u, spec, params);
    std::optional<IndicatorField> eu;
    if (cfg.scheme == Scheme::Full) eu = control_indicator(mesh, sol.u, sol.y, sol.z, spec);
    IndicatorField eo = combine_ocp(ey, ez, eu ? &*eu : nullptr, cfg.scheme);

    AfemRecord rec;
    rec.iteration = it;
    rec.dofs = mesh.num_dofs;
    rec.elements = mesh.num_elements();
    rec.eta_y = std::sqrt(ey.total());
    rec.eta_z = std::sqrt(ez.total());
    rec.eta_u = eu ? std::sqrt(eu->total()) : 0.0;
    rec.eta_ocp = std::sqrt(eo.total());
    rec.optimizer_iterations = sol.iterations;
    rec.optimizer_converged = sol.converged;
    AfemStep step{mesh, A, sol, ey, ez, eu ? &*eu : nullptr, eo};
    if (cfg.errors) {
      rec.errors = cfg.errors(step);
      rec.effectivity = effectivity_index(rec.eta_ocp, *rec.errors);
    }

    std::vector<int> marked;
    if (cfg.uniform) {
      marked.resize(mesh.num_elements());
      std::iota(marked.begin(), marked.end(), 0);
    } else {
      marked = dorfler_mark(eo, cfg.theta);
    }
    rec.marked = static_cast<int>(marked.size());
    for (int e : marked) rec.marked_on_boundary += touches_boundary(mesh, e);
    trace.records.push_back(rec);
    if (cfg.observer) cfg.observer(step, rec);
    if (cfg.log) {
      std::ostringstream os;
      os << "iter " << it << " N=" << rec.dofs << " eta_ocp=" << rec.eta_ocp << " opt_iters=" << sol.iterations;
      if (rec.errors) os << " err=" << rec.errors->total() << " eff=" << rec.effectivity;
      cfg.log(os.str());
    }

    if (!sol.converged) {
      trace.aborted = true;
      std::ostringstream os;
      os << "optimizer did not converge after " << sol.iterations << " iterations (last change " << sol.error << ")";
      trace.diagnostic = os.str();
      break;
    }
    if (cfg.tol > 0 && rec.eta_ocp <= cfg.tol) break;
    if (it >= cfg.max_iterations || marked.empty()) break;
    std::deque<RefineResult> chain;
    chain.push_back(refine(mesh, marked));
    for (int pass = 0; pass < 4 && chain.back().mesh.num_dofs <= mesh.num_dofs; ++pass) {
      // bisect the children of the marked elements again until N grows
      std::vector<int> parent = composed_parent(chain);
      std::vector<char> was_marked(mesh.num_elements(), 0);
      for (int e : marked) was_marked[e] = 1;
      std::vector<int> children;
      for (int e = 0; e < chain.back().mesh.num_elements(); ++e)
        if (was_marked[parent[e]]) children.push_back(e);
      chain.push_back(refine(chain.back().mesh, children));
    }
    if (chain.back().mesh.num_dofs > cfg.max_dofs) break;
    meshes.push_back(std::make_unique<Mesh>(chain.back().mesh));
    u0 = transfer_control(chain, *meshes.back(), spec, cfg.scheme, sol);
  }
  trace.final_mesh = *meshes.back();
  return trace;
}

void write_trace_csv(std::ostream& os, const AfemTrace& trace) {
  os.precision(10);
  os << "iter,N,eta_y,eta_z,eta_u,eta_ocp,err_y,err_z,err_u,eff,opt_iters\n";
  for (const auto& r : trace.records) {
    os << r.iteration << "," << r.dofs << "," << r.eta_y << "," << r.eta_z << "," << r.eta_u << "," << r.eta_ocp << ",";
    if (r.errors)
      os << r.errors->state << "," << r.errors->adjoint << "," << r.errors->control << "," << r.effectivity;
    else
      os << ",,,";
    os << "," << r.optimizer_iterations << "\n";
  }
}

}  // namespace fracocp
