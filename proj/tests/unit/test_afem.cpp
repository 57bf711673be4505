#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fracocp/afem.hpp"
#include "fracocp/experiments.hpp"

using namespace fracocp;

namespace {

IndicatorField field(std::vector<double> v) {
  return {IndicatorKind::Combined, Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()))};
}

// Smallest cardinality of a subset reaching theta^2 * total, by enumeration.
int minimal_cardinality(const Eigen::VectorXd& v, double theta) {
  const int n = static_cast<int>(v.size());
  const double goal = theta * theta * v.sum();
  int best = n + 1;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) s += v[i];
    if (s >= goal * (1 - 1e-12)) best = std::min(best, __builtin_popcount(mask));
  }
  return best;
}

AfemConfig small_config(Scheme scheme, double theta, int max_dofs) {
  AfemConfig cfg;
  cfg.scheme = scheme;
  cfg.theta = theta;
  cfg.max_dofs = max_dofs;
  return cfg;
}

}  // namespace

TEST(Dorfler, WorkedExample) { EXPECT_EQ(dorfler_mark(field({9, 4, 1}), 0.7), std::vector<int>{0}); }

TEST(Dorfler, FullBulkMarksNonzero) {
  EXPECT_EQ(dorfler_mark(field({0.5, 0.0, 2.0, 1e-30}), 1.0), (std::vector<int>{0, 2, 3}));
}

TEST(Dorfler, ZeroThetaMarksNothing) { EXPECT_TRUE(dorfler_mark(field({1, 2, 3}), 0.0).empty()); }

TEST(Dorfler, TiesBrokenById) { EXPECT_EQ(dorfler_mark(field({1, 2, 2, 2}), 0.6), (std::vector<int>{1, 2})); }

TEST(Dorfler, MinimalByExhaustiveSearch) {
  std::mt19937 rng(5);
  std::exponential_distribution<double> X(1.0);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + trial % 12;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = X(rng) * X(rng);
    double theta = 0.1 + 0.9 * (trial % 10) / 9.0;
    auto marked = dorfler_mark({IndicatorKind::Combined, v}, theta);
    double sum = 0.0;
    for (int e : marked) sum += v[e];
    EXPECT_GE(sum, theta * theta * v.sum() * (1 - 1e-14));
    EXPECT_EQ(static_cast<int>(marked.size()), minimal_cardinality(v, theta));
    for (int drop : marked) EXPECT_LT(sum - v[drop], theta * theta * v.sum());
  }
}

TEST(AfemLoop, ZeroIterationsGivesInitialRecord) {
  AfemConfig cfg = small_config(Scheme::Semi, 0.5, 4000);
  cfg.max_iterations = 0;
  AfemTrace t = afem_loop(setup_example1(0.5), cfg);
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.records[0].iteration, 0);
  EXPECT_FALSE(t.aborted);
}

TEST(AfemLoop, FullBulkEqualsUniformRefinement) {
  ProblemSpec spec = setup_example1(0.5);
  AfemConfig a = small_config(Scheme::Full, 1.0, 200);
  AfemConfig b = a;
  b.uniform = true;
  AfemTrace ta = afem_loop(spec, a), tb = afem_loop(spec, b);
  ASSERT_EQ(ta.records.size(), tb.records.size());
  for (std::size_t k = 0; k < ta.records.size(); ++k) {
    EXPECT_EQ(ta.records[k].dofs, tb.records[k].dofs);
    EXPECT_EQ(ta.records[k].marked, ta.records[k].elements);
  }
  EXPECT_EQ(ta.final_mesh.elements, tb.final_mesh.elements);
}

TEST(AfemLoop, DofsIncreaseAndRunIsDeterministic) {
  ProblemSpec spec = setup_example2(0.25);
  AfemConfig cfg = small_config(Scheme::Semi, 0.5, 150);
  AfemTrace t1 = afem_loop(spec, cfg), t2 = afem_loop(spec, cfg);
  ASSERT_GE(t1.records.size(), 3u);
  for (std::size_t k = 1; k < t1.records.size(); ++k) EXPECT_GT(t1.records[k].dofs, t1.records[k - 1].dofs);
  ASSERT_EQ(t1.records.size(), t2.records.size());
  for (std::size_t k = 0; k < t1.records.size(); ++k) {
    EXPECT_EQ(t1.records[k].dofs, t2.records[k].dofs);
    EXPECT_EQ(t1.records[k].eta_ocp, t2.records[k].eta_ocp);
  }
}

TEST(AfemLoop, ToleranceStopsEarly) {
  AfemConfig cfg = small_config(Scheme::Semi, 0.5, 4000);
  cfg.tol = 1e6;
  AfemTrace t = afem_loop(setup_example2(0.5), cfg);
  EXPECT_EQ(t.records.size(), 1u);
}

TEST(AfemLoop, OptimizerFailureAborts) {
  AfemConfig cfg = small_config(Scheme::Full, 0.5, 4000);
  cfg.optimizer_max_iter = 1;
  cfg.optimizer_tol = 1e-14;
  AfemTrace t = afem_loop(setup_example1(0.75), cfg);
  EXPECT_TRUE(t.aborted);
  EXPECT_EQ(t.records.size(), 1u);
  EXPECT_FALSE(t.diagnostic.empty());
  EXPECT_FALSE(t.records[0].optimizer_converged);
}

TEST(AfemLoop, MarkingConcentratesAtBoundaryAndEstimatorDecays) {
  ProblemSpec spec = setup_example1(0.25);
  AfemConfig cfg = small_config(Scheme::Full, 0.7, 700);
  AfemTrace t = afem_loop(spec, cfg);
  ASSERT_GE(t.records.size(), 5u);
  for (std::size_t k = 3; k < t.records.size(); ++k)
    EXPECT_GT(double(t.records[k].marked_on_boundary) / t.records[k].marked, 0.8) << "iteration " << k;
  int increases = 0;
  for (std::size_t k = 1; k < t.records.size(); ++k) increases += t.records[k].eta_ocp > t.records[k - 1].eta_ocp;
  EXPECT_LE(increases, 1);
}

TEST(TraceCsv, Header) {
  AfemConfig cfg = small_config(Scheme::Semi, 0.5, 4000);
  cfg.max_iterations = 0;
  AfemTrace t = afem_loop(setup_example2(0.5), cfg);
  std::stringstream ss;
  write_trace_csv(ss, t);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "iter,N,eta_y,eta_z,eta_u,eta_ocp,err_y,err_z,err_u,eff,opt_iters");
  ss.seekg(0);
  TraceTable tab = read_trace_csv(ss);
  ASSERT_EQ(tab.rows.size(), 1u);
  EXPECT_EQ(tab.column("N")[0], t.records[0].dofs);
}
