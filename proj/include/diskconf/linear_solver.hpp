#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "diskconf/errors.hpp"

namespace diskconf {

enum class SolveMethod { Direct, CG };

struct SolveOptions {
    SolveMethod method = SolveMethod::Direct;
    double rel_tol = 1e-10;
    int max_iter = 0;  // 0 means 10 * dimension
};

/// Symmetric sparse system with equality constraints on individual unknowns.
/// Constraints are handled by elimination: constrained columns move to the
/// right-hand side and the reduced matrix stays symmetric positive definite.
struct SparseSystem {
    int dimension = 0;
    std::vector<Eigen::Triplet<double>> entries;  // both symmetric halves
    Eigen::VectorXd rhs;
    std::vector<std::pair<int, double>> constraints;  // unknown index -> pinned value
};

/// Solves the reduced system to rel_tol; constrained unknowns take their
/// pinned values exactly. Throws NotPositiveDefiniteError on factorization
/// failure or CG breakdown, MaxIterationsError when CG stalls.
Eigen::VectorXd solve(const SparseSystem& system, const SolveOptions& options = {});

/// MatrixMarket coordinate dump of the (unreduced) matrix for debugging.
void write_matrix_market(std::ostream& out, int dimension,
                         const std::vector<Eigen::Triplet<double>>& entries);

/// Factorizes once for a fixed sparsity pattern and constraint index set, then
/// solves for any number of (rhs, constraint values) pairs. The two coordinate
/// solves of the harmonic map and of the Beltrami solver share matrices this way.
class ConstrainedSpdSolver {
public:
    ConstrainedSpdSolver(int dimension,
                         const std::vector<Eigen::Triplet<double>>& entries,
                         std::vector<int> constrained_indices,
                         const SolveOptions& options = {});

    /// `constraint_values[k]` pins unknown constrained_indices[k].
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs,
                          const std::vector<double>& constraint_values) const;

    int reduced_dimension() const { return n_free_; }
    const Eigen::SparseMatrix<double>& reduced_matrix() const { return reduced_; }

private:
    int dimension_;
    int n_free_;
    SolveOptions options_;
    std::vector<int> constrained_;     // sorted
    std::vector<int> free_of_full_;    // full index -> free index or -1
    std::vector<int> full_of_free_;    // free index -> full index
    Eigen::SparseMatrix<double> reduced_;
    Eigen::SparseMatrix<double> coupling_;  // free x constrained
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
};

}  // namespace diskconf
