#include "asyncqp/problem_gen.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "asyncqp/rng.hpp"

namespace asyncqp {

void GenSpec::validate() const {
    if (n < 1) throw std::invalid_argument("generator: n must be >= 1");
    if (block_sizes.empty()) {
        if (num_agents < 1 || num_agents > n)
            throw std::invalid_argument("generator: need 1 <= agents <= n");
    } else {
        int total = 0;
        for (int s : block_sizes) total += s;
        if (total != n) throw std::invalid_argument("generator: block sizes must sum to n");
    }
    if (!(norm2 > 0.0)) throw std::invalid_argument("generator: target ||Q||_2 must be > 0");
    if (!(cond >= 1.0)) throw std::invalid_argument("generator: target cond must be >= 1");
    if (n == 1 && cond != 1.0)
        throw std::invalid_argument("generator: a 1x1 matrix has cond = 1");
    if (!r_explicit.empty() && static_cast<int>(r_explicit.size()) != n)
        throw std::invalid_argument("generator: explicit r has wrong dimension");
    if (r_explicit.empty() && r_norm < 0.0)
        throw std::invalid_argument("generator: target ||r||_2 must be >= 0");
}

BlockPartition even_partition(int n, int num_agents) {
    if (num_agents < 1 || num_agents > n)
        throw std::invalid_argument("even_partition: need 1 <= N <= n");
    const int base = n / num_agents;
    const int extra = n % num_agents;
    std::vector<int> sizes(static_cast<std::size_t>(num_agents), base);
    for (int i = 0; i < extra; ++i) ++sizes[static_cast<std::size_t>(i)];
    return BlockPartition(std::move(sizes));
}

Matrix random_orthogonal(int n, std::uint64_t seed) {
    Rng rng(seed);
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.gaussian();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix u = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0.0) u.col(j) = -u.col(j);
    return u;
}

Matrix generate_q(const GenSpec& spec) {
    spec.validate();
    const int n = spec.n;
    if (spec.cond == 1.0) return spec.norm2 * Matrix::Identity(n, n);

    const double lambda_max = spec.norm2;
    const double lambda_min = spec.norm2 / spec.cond;
    Rng rng(mix64(spec.seed ^ 0x51474e45ULL));
    std::vector<double> lambda(static_cast<std::size_t>(n));
    lambda[0] = lambda_max;
    lambda[static_cast<std::size_t>(n - 1)] = lambda_min;
    for (int i = 1; i + 1 < n; ++i) {
        const double u = rng.u01();
        lambda[static_cast<std::size_t>(i)] =
            spec.spectrum == SpectrumLaw::LogUniform
                ? lambda_min * std::pow(lambda_max / lambda_min, u)
                : lambda_min + u * (lambda_max - lambda_min);
    }
    std::sort(lambda.begin(), lambda.end(), std::greater<double>());

    const Matrix u = random_orthogonal(n, mix64(spec.seed ^ 0x51524f54ULL));
    Vector d(n);
    for (int i = 0; i < n; ++i) d(i) = lambda[static_cast<std::size_t>(i)];
    Matrix q = u * d.asDiagonal() * u.transpose();
    return 0.5 * (q + q.transpose()).eval();
}

Vector generate_r(const GenSpec& spec) {
    spec.validate();
    if (!spec.r_explicit.empty())
        return Eigen::Map<const Vector>(spec.r_explicit.data(),
                                        static_cast<Eigen::Index>(spec.r_explicit.size()));
    if (spec.r_norm == 0.0) return Vector::Zero(spec.n);
    Rng rng(mix64(spec.seed ^ 0x5247454eULL));
    Vector g(spec.n);
    for (int i = 0; i < spec.n; ++i) g(i) = rng.gaussian();
    const double norm = g.norm();
    if (norm == 0.0) throw Error("generate_r: degenerate zero draw");
    return g * (spec.r_norm / norm);
}

QuadraticProblem generate_problem(const GenSpec& spec) {
    spec.validate();
    BlockPartition partition = spec.block_sizes.empty()
                                   ? even_partition(spec.n, spec.num_agents)
                                   : BlockPartition(spec.block_sizes);
    return QuadraticProblem(generate_q(spec), generate_r(spec), std::move(partition));
}

}  // namespace asyncqp
