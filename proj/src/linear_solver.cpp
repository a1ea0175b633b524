#include "diskconf/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

namespace diskconf {

ConstrainedSpdSolver::ConstrainedSpdSolver(
    int dimension, const std::vector<Eigen::Triplet<double>>& entries,
    std::vector<int> constrained_indices, const SolveOptions& options)
    : dimension_(dimension), options_(options), constrained_(std::move(constrained_indices)) {
    std::sort(constrained_.begin(), constrained_.end());
    constrained_.erase(std::unique(constrained_.begin(), constrained_.end()),
                       constrained_.end());

    free_of_full_.assign(dimension_, -1);
    std::vector<char> pinned(dimension_, 0);
    for (int c : constrained_) pinned[c] = 1;
    full_of_free_.reserve(dimension_ - static_cast<int>(constrained_.size()));
    for (int i = 0; i < dimension_; ++i) {
        if (!pinned[i]) {
            free_of_full_[i] = static_cast<int>(full_of_free_.size());
            full_of_free_.push_back(i);
        }
    }
    n_free_ = static_cast<int>(full_of_free_.size());

    std::vector<int> constrained_rank(dimension_, -1);
    for (size_t k = 0; k < constrained_.size(); ++k)
        constrained_rank[constrained_[k]] = static_cast<int>(k);

    std::vector<Eigen::Triplet<double>> reduced_entries;
    std::vector<Eigen::Triplet<double>> coupling_entries;
    reduced_entries.reserve(entries.size());
    for (const auto& t : entries) {
        int fi = free_of_full_[t.row()];
        int fj = free_of_full_[t.col()];
        if (fi >= 0 && fj >= 0) {
            reduced_entries.emplace_back(fi, fj, t.value());
        } else if (fi >= 0) {
            coupling_entries.emplace_back(fi, constrained_rank[t.col()], t.value());
        }
        // rows of constrained unknowns are dropped
    }
    reduced_.resize(n_free_, n_free_);
    reduced_.setFromTriplets(reduced_entries.begin(), reduced_entries.end());
    coupling_.resize(n_free_, static_cast<int>(constrained_.size()));
    coupling_.setFromTriplets(coupling_entries.begin(), coupling_entries.end());

    if (options_.method == SolveMethod::Direct && n_free_ > 0) {
        llt_.compute(reduced_);
        if (llt_.info() != Eigen::Success)
            throw NotPositiveDefiniteError(
                "sparse Cholesky factorization failed; reduced matrix is not SPD");
    }
}

Eigen::VectorXd ConstrainedSpdSolver::solve(
    const Eigen::VectorXd& rhs, const std::vector<double>& constraint_values) const {
    Eigen::VectorXd pinned(constrained_.size());
    for (size_t k = 0; k < constrained_.size(); ++k) pinned[k] = constraint_values[k];

    Eigen::VectorXd full(dimension_);
    for (size_t k = 0; k < constrained_.size(); ++k) full[constrained_[k]] = pinned[k];

    if (n_free_ == 0) return full;

    Eigen::VectorXd b(n_free_);
    for (int k = 0; k < n_free_; ++k) b[k] = rhs[full_of_free_[k]];
    b -= coupling_ * pinned;

    Eigen::VectorXd x;
    if (options_.method == SolveMethod::Direct) {
        x = llt_.solve(b);
        if (llt_.info() != Eigen::Success)
            throw NotPositiveDefiniteError("sparse Cholesky solve failed");
    } else {
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                                 Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>>
            cg;
        cg.setTolerance(options_.rel_tol);
        cg.setMaxIterations(options_.max_iter > 0 ? options_.max_iter : 10 * n_free_);
        cg.compute(reduced_);
        x = cg.solve(b);
        if (cg.info() == Eigen::NoConvergence)
            throw MaxIterationsError("conjugate gradient did not converge in " +
                                     std::to_string(cg.maxIterations()) +
                                     " iterations (error " + std::to_string(cg.error()) +
                                     ")");
        if (cg.info() != Eigen::Success || !x.allFinite())
            throw NotPositiveDefiniteError("conjugate gradient breakdown");
    }
    for (int k = 0; k < n_free_; ++k) full[full_of_free_[k]] = x[k];
    return full;
}

Eigen::VectorXd solve(const SparseSystem& system, const SolveOptions& options) {
    std::vector<int> indices;
    indices.reserve(system.constraints.size());
    for (const auto& [i, v] : system.constraints) indices.push_back(i);

    ConstrainedSpdSolver solver(system.dimension, system.entries, indices, options);

    // ConstrainedSpdSolver sorts and dedupes; mirror that order for the values.
    std::vector<std::pair<int, double>> sorted = system.constraints;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end(),
                             [](const auto& a, const auto& b) { return a.first == b.first; }),
                 sorted.end());
    std::vector<double> values;
    values.reserve(sorted.size());
    for (const auto& [i, v] : sorted) values.push_back(v);

    return solver.solve(system.rhs, values);
}

void write_matrix_market(std::ostream& out, int dimension,
                         const std::vector<Eigen::Triplet<double>>& entries) {
    Eigen::SparseMatrix<double> mat(dimension, dimension);
    mat.setFromTriplets(entries.begin(), entries.end());
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    // Count the lower triangle only, as required by the symmetric qualifier.
    long nnz = 0;
    for (int k = 0; k < mat.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it)
            if (it.row() >= it.col()) nnz++;
    out << dimension << ' ' << dimension << ' ' << nnz << '\n';
    char buf[64];
    for (int k = 0; k < mat.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it)
            if (it.row() >= it.col()) {
                std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n",
                              static_cast<long>(it.row()) + 1,
                              static_cast<long>(it.col()) + 1, it.value());
                out << buf;
            }
}

}  // namespace diskconf
