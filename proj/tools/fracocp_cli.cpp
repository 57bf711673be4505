#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fracocp/experiments.hpp"

using namespace fracocp;

int main(int argc, char** argv) {
  CLI::App app{"Adaptive finite elements for bilinear optimal control with the integral fractional Laplacian"};
  app.require_subcommand(1);

  StudyConfig cfg;
  std::string scheme = "semi";
  double lambda = 0, a = 0, b = 0;
  auto* run = app.add_subcommand("run", "run an adaptive (or uniform) study and write trace.csv and rates.txt");
  run->add_option("--example", cfg.example, "example id")->check(CLI::IsMember({1, 2}));
  run->add_option("--s", cfg.s, "fractional order")->check(CLI::Range(0.0, 1.0));
  run->add_option("--theta", cfg.theta, "marking parameter")->check(CLI::Range(0.0, 1.0));
  run->add_option("--scheme", scheme, "control discretization")->check(CLI::IsMember({"full", "semi"}));
  auto* ol = run->add_option("--lambda", lambda, "regularization weight");
  auto* oa = run->add_option("--a", a, "lower control bound");
  auto* ob = run->add_option("--b", b, "upper control bound");
  run->add_option("--max-dofs", cfg.max_dofs, "stop once refinement exceeds this many degrees of freedom");
  run->add_option("--max-iter", cfg.max_iterations, "maximum number of adaptive iterations");
  run->add_option("--tol", cfg.tol, "stop once eta_ocp drops below this value");
  run->add_option("--out", cfg.out_dir, "output directory")->required();
  run->add_flag("--uniform", cfg.uniform, "refine all elements every iteration");
  run->add_flag("--indicators", cfg.write_indicators, "dump per-element indicators every iteration");

  double vs = 0.5;
  int vmax = 3000;
  auto* validate = app.add_subcommand("validate", "forward check with f = 1, u = 0 on the disk");
  validate->add_option("--s", vs, "fractional order")->check(CLI::Range(0.0, 1.0));
  validate->add_option("--max-dofs", vmax, "largest mesh size");

  std::string trace_path;
  auto* rates = app.add_subcommand("rates", "fit convergence slopes from an existing trace.csv");
  rates->add_option("trace", trace_path, "trace CSV")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  auto log = [](const std::string& line) { std::cerr << line << std::endl; };

  try {
    if (*run) {
      cfg.scheme = parse_scheme(scheme);
      if (*ol) cfg.lambda = lambda;
      if (*oa) cfg.a = a;
      if (*ob) cfg.b = b;
      StudyResult res = run_study(cfg, log);
      write_rates(std::cout, res.slopes);
      if (res.trace.aborted) {
        std::cerr << "aborted: " << res.trace.diagnostic << "\n";
        return 2;
      }
    } else if (*validate) {
      GetoorResult g = getoor_study(vs, vmax, 4, log);
      double rel = std::abs(g.integral.back() - g.exact_integral) / g.exact_integral;
      std::cout << "exact_integral " << g.exact_integral << "\nfinal_integral " << g.integral.back()
                << "\nrelative_deviation " << rel << "\nenergy_slope " << g.slope << "\n";
    } else if (*rates) {
      std::ifstream is(trace_path);
      write_rates(std::cout, trace_slopes(read_trace_csv(is)));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
