#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "fracocp/complement.hpp"
#include "fracocp/kernel.hpp"
#include "fracocp/mesh.hpp"
#include "fracocp/pair_integrals.hpp"

namespace fracocp {

using ScalarField = std::function<double(const Vec2&)>;
// Coefficient evaluated at a point of element e with barycentric coordinates l.
using ElementField = std::function<double(int e, const std::array<double, 3>& l, const Vec2& x)>;

// Number of worker threads, read from FRACOCP_WORKERS (default 1).
int worker_count();

// Dense stiffness matrix over the interior nodes:
// A_ij = (C/2) sum_{T,T'} int_T int_T' (...) + C int_Omega phi_i phi_j rho.
Eigen::MatrixXd assemble_stiffness(const Mesh& mesh, const KernelParams& params, const QuadratureConfig& cfg = {},
                                   int workers = 0);

// C * int_Omega phi_i phi_j rho(x) dx over the interior nodes.
Eigen::MatrixXd assemble_complement_term(const Mesh& mesh, const KernelParams& params,
                                         const ComplementDensity& rho);

// M_ij = int u phi_i phi_j over the interior nodes (or all nodes when all_nodes is set).
Eigen::MatrixXd assemble_weighted_mass(const Mesh& mesh, const ElementField& u, int degree = 6, bool all_nodes = false);
Eigen::MatrixXd assemble_piecewise_constant_mass(const Mesh& mesh, const Eigen::VectorXd& u, bool all_nodes = false);

// F_i = int f phi_i over the interior nodes (or all nodes).
Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarField& f, int degree = 8, bool all_nodes = false);
Eigen::VectorXd assemble_load(const Mesh& mesh, const ElementField& f, int degree, bool all_nodes = false);

void write_dense_matrix(std::ostream& os, const Eigen::MatrixXd& A);

}  // namespace fracocp
