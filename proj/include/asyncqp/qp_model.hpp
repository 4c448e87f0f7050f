#pragma once

#include <optional>
#include <vector>

#include "asyncqp/types.hpp"

namespace asyncqp {

/// Division of an n-vector into N agent-owned blocks of sizes n_1..n_N.
/// Block i owns the half-open index range [start(i), start(i) + size(i)).
class BlockPartition {
public:
    explicit BlockPartition(std::vector<int> sizes);

    int num_blocks() const { return static_cast<int>(sizes_.size()); }
    int total() const { return total_; }
    int size(int block) const;
    int start(int block) const;

    const std::vector<int>& sizes() const { return sizes_; }

    bool operator==(const BlockPartition& other) const { return sizes_ == other.sizes_; }

private:
    std::vector<int> sizes_;
    std::vector<int> starts_;
    int total_ = 0;
};

/// Per-coordinate box bounds, lower < upper everywhere (non-empty compact
/// convex constraint sets as hyperrectangles).
struct Box {
    Vector lower;
    Vector upper;
};

struct SpectralInfo {
    double norm2 = 0.0;       // ||Q||_2 (= lambda_1 for symmetric PD)
    double lambda_min = 0.0;  // meaningful only if lambda_min_valid
    double cond = 0.0;        // norm2 / lambda_min when valid
    bool is_upper_bound = false;
    bool lambda_min_valid = true;
};

/// Per-agent regularization parameters alpha_1..alpha_N > 0. The implied
/// matrix is A = diag(alpha_1 I_{n_1}, ..., alpha_N I_{n_N}).
struct RegularizationChoice {
    std::vector<double> alphas;

    double alpha_min() const;
    double alpha_max() const;
    Vector diagonal(const BlockPartition& partition) const;
};

/// Expand one value per block into a coordinate vector (the diagonal of a
/// block-diagonal matrix like Gamma or A).
Vector expand_blockwise(const std::vector<double>& per_block, const BlockPartition& partition);

/// minimize 0.5 x'Qx + r'x over x in the (optional) box, with Q symmetric
/// positive definite. Immutable after construction; construction symmetrizes
/// Q when the asymmetry is within 1e-10 relative and rejects otherwise, and
/// rejects non-PD matrices.
class QuadraticProblem {
public:
    QuadraticProblem(Matrix q, Vector r, BlockPartition partition,
                     std::optional<Box> box = std::nullopt);

    const Matrix& q() const { return q_; }
    const Vector& r() const { return r_; }
    const BlockPartition& partition() const { return partition_; }
    const std::optional<Box>& box() const { return box_; }
    int dim() const { return static_cast<int>(r_.size()); }
    int num_agents() const { return partition_.num_blocks(); }

    double objective(const Vector& x) const;
    Vector gradient(const Vector& x) const;             // Qx + r
    Vector gradient_block(int agent, const Vector& x) const;  // Q^[i] x + r^[i]

    Matrix q_row_block(int agent) const;   // Q^[i], the n_i x n row slice
    Vector r_block(int agent) const;       // r^[i]

    /// Unconstrained minimizer solving Q x = -r (Cholesky + one refinement
    /// step). Residual is checked against 1e-8 * (1 + ||r||_2).
    Vector exact_minimizer() const;

private:
    Matrix q_;
    Vector r_;
    BlockPartition partition_;
    std::optional<Box> box_;
};

/// Rows (entries) of M belonging to agent `block`.
Matrix block_rows(const Matrix& m, int block, const BlockPartition& partition);
Vector block_rows(const Vector& v, int block, const BlockPartition& partition);

/// f + 0.5 x'Ax: Q becomes Q + A, r and partition unchanged.
QuadraticProblem regularize(const QuadraticProblem& problem, const RegularizationChoice& choice);

/// Extreme eigenvalues by a dense symmetric eigensolver; exact values.
SpectralInfo spectral_exact(const Matrix& q);

/// Cheap conservative bounds: norm2 from Gershgorin discs (tightened by the
/// trace when positive definiteness is certified), lambda_min from the
/// lowest disc edge. norm2 always >= the exact ||Q||_2.
SpectralInfo spectral_bounds(const Matrix& q);

/// Coordinatewise clamp onto the box; identity on interior points.
Vector project_box(const Vector& x, const Box& box);

/// ||M||_2 of a general square matrix via the largest eigenvalue of the
/// symmetric product M'M.
double spectral_norm(const Matrix& m);

/// Eigenvalues of a symmetric matrix, ascending.
Vector symmetric_eigenvalues(const Matrix& m);

}  // namespace asyncqp
