#include "fracocp/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fracocp {

ExactSolution exact_solution_disk(double s, double lambda, double a, double b) {
  ExactSolution ex;
  ex.s = s;
  ex.lambda = lambda;
  ex.a = a;
  ex.b = b;
  ex.c = std::pow(2.0, -2.0 * s) / std::pow(std::tgamma(1.0 + s), 2);
  const double c = ex.c;
  auto y = [c, s](const Vec2& x) {
    double r2 = x.squaredNorm();
    return r2 >= 1.0 ? 0.0 : c * std::pow(1.0 - r2, s);
  };
  auto u = [y, lambda, a, b](const Vec2& x) {
    double v = y(x);
    return clamp(v * v / lambda, a, b);
  };
  ex.y = y;
  ex.z = y;
  ex.u = u;
  ex.f = [y, u](const Vec2& x) { return 1.0 + u(x) * y(x); };
  ex.yd = [y, u](const Vec2& x) { return y(x) - 1.0 - u(x) * y(x); };
  ex.state_rhs = [](const Vec2&) { return 1.0; };
  ex.adjoint_rhs = ex.state_rhs;
  ex.state_energy = c * std::numbers::pi / (s + 1.0);
  ex.adjoint_energy = ex.state_energy;
  return ex;
}

ProblemSpec setup_example1(double s, double lambda, double a, double b) {
  ExactSolution ex = exact_solution_disk(s, lambda, a, b);
  ProblemSpec p;
  p.s = s;
  p.lambda = lambda;
  p.a = a;
  p.b = b;
  p.f = ex.f;
  p.yd = ex.yd;
  p.domain = Domain::Disk;
  p.initial_resolution = 2;
  return p;
}

ProblemSpec setup_example2(double s) {
  ProblemSpec p;
  p.s = s;
  p.lambda = 1.0;
  p.a = 0.5;
  p.b = 1.5;
  p.f = [](const Vec2&) { return -4.0; };
  p.yd = [](const Vec2&) { return 4.0; };
  p.domain = Domain::Square;
  p.initial_resolution = 2;
  return p;
}

ErrorTriple exact_errors(const FeFunction& y, const FeFunction& z, const Control& u, const ExactSolution& exact,
                         const Eigen::MatrixXd& A) {
  const Mesh& mesh = *y.mesh;
  auto energy = [&](const FeFunction& v, const ScalarField& g, double exact_energy) {
    double e2 = exact_energy - 2.0 * assemble_load(mesh, g).dot(v.coeffs) + v.coeffs.dot(A * v.coeffs);
    return std::sqrt(std::max(0.0, e2));
  };
  ErrorTriple out;
  out.state = energy(y, exact.state_rhs, exact.state_energy);
  out.adjoint = energy(z, exact.adjoint_rhs, exact.adjoint_energy);
  const TriangleRule& q = triangle_rule(7);
  double sum = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double se = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      double d = exact.u(mesh.point(e, q.bary[i])) - u(e, q.bary[i]);
      se += q.w[i] * d * d;
    }
    sum += se * mesh.areas[e];
  }
  out.control = std::sqrt(sum);
  return out;
}

double fit_slope(const std::vector<double>& dofs, const std::vector<double>& values, int count) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < dofs.size() && i < values.size(); ++i)
    if (dofs[i] > 0 && values[i] > 0 && std::isfinite(values[i])) {
      lx.push_back(std::log(dofs[i]));
      ly.push_back(std::log(values[i]));
    }
  const int n = static_cast<int>(lx.size());
  if (count <= 0) count = std::max(3, n / 2);
  count = std::min(count, n);
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (int i = n - count; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= count;
  my /= count;
  double sxy = 0, sxx = 0;
  for (int i = n - count; i < n; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> TraceTable::column(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == name) {
      std::vector<double> out;
      for (const auto& r : rows) out.push_back(j < r.size() ? r[j] : std::numeric_limits<double>::quiet_NaN());
      return out;
    }
  throw std::out_of_range("trace column not found: " + name);
}

TraceTable trace_table(const AfemTrace& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  std::istringstream is(os.str());
  return read_trace_csv(is);
}

TraceTable read_trace_csv(std::istream& is) {
  TraceTable t;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty trace file");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) row.push_back(cell.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(cell));
    while (row.size() < t.columns.size()) row.push_back(std::numeric_limits<double>::quiet_NaN());
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::map<std::string, double> trace_slopes(const TraceTable& table) {
  std::map<std::string, double> out;
  auto n = table.column("N");
  for (const char* name : {"err_y", "err_z", "err_u", "eta_y", "eta_z", "eta_u", "eta_ocp"}) {
    double slope = fit_slope(n, table.column(name));
    if (std::isfinite(slope)) out[name] = slope;
  }
  return out;
}

void write_rates(std::ostream& os, const std::map<std::string, double>& slopes) {
  os << std::setprecision(6);
  for (const auto& [k, v] : slopes) os << k << " " << v << "\n";
}

StudyResult run_study(const StudyConfig& config, const std::function<void(const std::string&)>& log) {
  if (!(config.s > 0 && config.s < 1)) throw std::invalid_argument("s must lie in (0,1)");
  if (config.theta < 0 || config.theta > 1) throw std::invalid_argument("theta must lie in [0,1]");
  ProblemSpec spec;
  std::optional<ExactSolution> exact;
  if (config.example == 1) {
    double lambda = config.lambda.value_or(0.1), a = config.a.value_or(0.4), b = config.b.value_or(1.5);
    spec = setup_example1(config.s, lambda, a, b);
    exact = exact_solution_disk(config.s, lambda, a, b);
  } else if (config.example == 2) {
    spec = setup_example2(config.s);
    if (config.lambda) spec.lambda = *config.lambda;
    if (config.a) spec.a = *config.a;
    if (config.b) spec.b = *config.b;
  } else {
    throw std::invalid_argument("unknown example id");
  }

  namespace fs = std::filesystem;
  const bool write = !config.out_dir.empty();
  if (write) fs::create_directories(config.out_dir);

  AfemConfig ac;
  ac.scheme = config.scheme;
  ac.theta = config.theta;
  ac.uniform = config.uniform;
  ac.max_dofs = config.max_dofs;
  ac.max_iterations = config.max_iterations;
  ac.tol = config.tol;
  ac.quadrature = config.quadrature;
  ac.log = log;
  if (exact) {
    ac.errors = [ex = *exact](const AfemStep& st) {
      return exact_errors(st.solution.y, st.solution.z, st.solution.u, ex, st.A);
    };
  }
  if (write) {
    ac.observer = [&config](const AfemStep& st, const AfemRecord& rec) {
      std::ostringstream name;
      name << std::setw(3) << std::setfill('0') << rec.iteration;
      if (config.write_meshes) {
        std::ofstream m(fs::path(config.out_dir) / ("mesh_" + name.str() + ".txt"));
        write_mesh(m, st.mesh);
      }
      if (config.write_indicators) {
        std::ofstream ind(fs::path(config.out_dir) / ("indicators_" + name.str() + ".txt"));
        write_indicators(ind, st.state, st.adjoint, st.control, st.combined);
      }
    };
  }

  StudyResult res;
  res.trace = afem_loop(spec, ac);
  res.slopes = trace_slopes(trace_table(res.trace));
  if (write) {
    std::ofstream csv(fs::path(config.out_dir) / "trace.csv");
    write_trace_csv(csv, res.trace);
    std::ofstream rates(fs::path(config.out_dir) / "rates.txt");
    write_rates(rates, res.slopes);
    if (res.trace.aborted) rates << "aborted " << res.trace.diagnostic << "\n";
  }
  return res;
}

GetoorResult getoor_study(double s, int max_dofs, int initial_resolution,
                          const std::function<void(const std::string&)>& log) {
  const KernelParams params = make_kernel_params(s);
  GetoorResult out;
  const double c = std::pow(2.0, -2.0 * s) / std::pow(std::tgamma(1.0 + s), 2);
  out.exact_integral = c * std::numbers::pi / (s + 1.0);
  Mesh mesh = initial_mesh(Domain::Disk, initial_resolution);
  while (mesh.num_dofs <= max_dofs) {
    Eigen::MatrixXd A = assemble_stiffness(mesh, params);
    Eigen::VectorXd F = assemble_load(mesh, [](const Vec2&) { return 1.0; });
    FeFunction y = solve_state(mesh, A, Eigen::MatrixXd::Zero(mesh.num_dofs, mesh.num_dofs), F);
    double integral = F.dot(y.coeffs);
    double e2 = out.exact_integral - 2.0 * integral + y.coeffs.dot(A * y.coeffs);
    out.dofs.push_back(mesh.num_dofs);
    out.integral.push_back(integral);
    out.energy_error.push_back(std::sqrt(std::max(0.0, e2)));
    if (log) {
      std::ostringstream os;
      os << "N=" << mesh.num_dofs << " int=" << integral << " err=" << out.energy_error.back();
      log(os.str());
    }
    mesh = uniform_refine(mesh);
  }
  std::vector<double> n(out.dofs.begin(), out.dofs.end());
  out.slope = fit_slope(n, out.energy_error);
  return out;
}

}  // namespace fracocp
