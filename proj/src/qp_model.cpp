#include "asyncqp/qp_model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace asyncqp {

namespace {

constexpr double kSymmetryTol = 1e-10;

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

BlockPartition::BlockPartition(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw std::invalid_argument("block partition needs at least one block");
    starts_.reserve(sizes_.size());
    for (int s : sizes_) {
        if (s < 1) throw std::invalid_argument("block sizes must be >= 1");
        starts_.push_back(total_);
        total_ += s;
    }
}

int BlockPartition::size(int block) const {
    if (block < 0 || block >= num_blocks()) throw std::invalid_argument("block index out of range");
    return sizes_[static_cast<std::size_t>(block)];
}

int BlockPartition::start(int block) const {
    if (block < 0 || block >= num_blocks()) throw std::invalid_argument("block index out of range");
    return starts_[static_cast<std::size_t>(block)];
}

double RegularizationChoice::alpha_min() const {
    if (alphas.empty()) throw std::invalid_argument("empty regularization choice");
    return *std::min_element(alphas.begin(), alphas.end());
}

double RegularizationChoice::alpha_max() const {
    if (alphas.empty()) throw std::invalid_argument("empty regularization choice");
    return *std::max_element(alphas.begin(), alphas.end());
}

Vector RegularizationChoice::diagonal(const BlockPartition& partition) const {
    return expand_blockwise(alphas, partition);
}

Vector expand_blockwise(const std::vector<double>& per_block, const BlockPartition& partition) {
    if (static_cast<int>(per_block.size()) != partition.num_blocks())
        throw std::invalid_argument("per-block values do not match partition block count");
    Vector out(partition.total());
    for (int i = 0; i < partition.num_blocks(); ++i)
        out.segment(partition.start(i), partition.size(i)).setConstant(per_block[static_cast<std::size_t>(i)]);
    return out;
}

QuadraticProblem::QuadraticProblem(Matrix q, Vector r, BlockPartition partition,
                                   std::optional<Box> box)
    : q_(std::move(q)), r_(std::move(r)), partition_(std::move(partition)), box_(std::move(box)) {
    const auto n = r_.size();
    if (q_.rows() != n || q_.cols() != n)
        throw std::invalid_argument("Q must be n x n with n = dim(r)");
    if (partition_.total() != n)
        throw std::invalid_argument("partition does not cover the problem dimension");

    const double scale = std::max(1.0, max_abs(q_));
    const double asym = max_abs(Matrix(q_ - q_.transpose()));
    if (asym > kSymmetryTol * scale)
        throw std::invalid_argument("Q is not symmetric (relative asymmetry above 1e-10)");
    q_ = 0.5 * (q_ + q_.transpose()).eval();

    Eigen::LLT<Matrix> llt(q_);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("Q is not positive definite (Cholesky failed)");

    if (box_) {
        if (box_->lower.size() != n || box_->upper.size() != n)
            throw std::invalid_argument("box bounds must have dimension n");
        if (!(box_->lower.array() < box_->upper.array()).all())
            throw std::invalid_argument("box requires lower < upper per coordinate");
    }
}

double QuadraticProblem::objective(const Vector& x) const {
    if (x.size() != dim()) throw std::invalid_argument("objective: dimension mismatch");
    return 0.5 * x.dot(q_ * x) + r_.dot(x);
}

Vector QuadraticProblem::gradient(const Vector& x) const {
    if (x.size() != dim()) throw std::invalid_argument("gradient: dimension mismatch");
    return q_ * x + r_;
}

Vector QuadraticProblem::gradient_block(int agent, const Vector& x) const {
    if (x.size() != dim()) throw std::invalid_argument("gradient_block: dimension mismatch");
    const int s = partition_.start(agent);
    const int len = partition_.size(agent);
    return q_.middleRows(s, len) * x + r_.segment(s, len);
}

Matrix QuadraticProblem::q_row_block(int agent) const {
    return block_rows(q_, agent, partition_);
}

Vector QuadraticProblem::r_block(int agent) const {
    return block_rows(r_, agent, partition_);
}

Vector QuadraticProblem::exact_minimizer() const {
    Eigen::LLT<Matrix> llt(q_);
    if (llt.info() != Eigen::Success) throw Error("exact_minimizer: Cholesky failed");
    Vector x = llt.solve(-r_);
    x += llt.solve(-r_ - q_ * x);  // one refinement step
    const double residual = (q_ * x + r_).norm();
    if (residual > 1e-8 * (1.0 + r_.norm()))
        throw Error("exact_minimizer: residual exceeds 1e-8 * (1 + ||r||)");
    return x;
}

Matrix block_rows(const Matrix& m, int block, const BlockPartition& partition) {
    if (m.rows() != partition.total())
        throw std::invalid_argument("block_rows: matrix rows do not match partition");
    return m.middleRows(partition.start(block), partition.size(block));
}

Vector block_rows(const Vector& v, int block, const BlockPartition& partition) {
    if (v.size() != partition.total())
        throw std::invalid_argument("block_rows: vector size does not match partition");
    return v.segment(partition.start(block), partition.size(block));
}

QuadraticProblem regularize(const QuadraticProblem& problem, const RegularizationChoice& choice) {
    for (double a : choice.alphas)
        if (!(a > 0.0)) throw std::invalid_argument("regularize: all alpha_i must be > 0");
    Matrix q = problem.q();
    q += choice.diagonal(problem.partition()).asDiagonal();
    return QuadraticProblem(std::move(q), problem.r(), problem.partition(), problem.box());
}

SpectralInfo spectral_exact(const Matrix& q) {
    if (q.rows() != q.cols()) throw std::invalid_argument("spectral_exact: matrix must be square");
    const double scale = std::max(1.0, max_abs(q));
    if (max_abs(Matrix(q - q.transpose())) > kSymmetryTol * scale)
        throw std::invalid_argument("spectral_exact: matrix must be symmetric");
    const Vector evs = symmetric_eigenvalues(q);
    SpectralInfo info;
    info.lambda_min = evs(0);
    info.norm2 = std::max(std::abs(evs(0)), std::abs(evs(evs.size() - 1)));
    info.is_upper_bound = false;
    info.lambda_min_valid = info.lambda_min > 0.0;
    info.cond = info.lambda_min_valid ? info.norm2 / info.lambda_min
                                      : std::numeric_limits<double>::infinity();
    return info;
}

SpectralInfo spectral_bounds(const Matrix& q) {
    if (q.rows() != q.cols()) throw std::invalid_argument("spectral_bounds: matrix must be square");
    const auto n = q.rows();
    double disc_hi = -std::numeric_limits<double>::infinity();
    double disc_lo = std::numeric_limits<double>::infinity();
    double disc_abs = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double radius = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) radius += std::abs(q(i, j));
        disc_hi = std::max(disc_hi, q(i, i) + radius);
        disc_lo = std::min(disc_lo, q(i, i) - radius);
        disc_abs = std::max(disc_abs, std::abs(q(i, i)) + radius);
    }
    SpectralInfo info;
    info.is_upper_bound = true;
    info.lambda_min = disc_lo;
    info.lambda_min_valid = disc_lo > 0.0;
    // The trace bounds lambda_1 only once all eigenvalues are known
    // nonnegative, i.e. when the lowest disc certifies PD.
    info.norm2 = info.lambda_min_valid ? std::min(disc_hi, q.trace()) : disc_abs;
    info.cond = info.lambda_min_valid ? info.norm2 / info.lambda_min
                                      : std::numeric_limits<double>::infinity();
    return info;
}

Vector project_box(const Vector& x, const Box& box) {
    if (x.size() != box.lower.size()) throw std::invalid_argument("project_box: dimension mismatch");
    return x.cwiseMax(box.lower).cwiseMin(box.upper);
}

double spectral_norm(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("spectral_norm: matrix must be square");
    Matrix mtm = m.transpose() * m;
    mtm = 0.5 * (mtm + mtm.transpose()).eval();
    const Vector evs = symmetric_eigenvalues(mtm);
    return std::sqrt(std::max(0.0, evs(evs.size() - 1)));
}

Vector symmetric_eigenvalues(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver failed to converge");
    return solver.eigenvalues();
}

}  // namespace asyncqp
