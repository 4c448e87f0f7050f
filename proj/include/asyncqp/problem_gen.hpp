#pragma once

#include <cstdint>
#include <vector>

#include "asyncqp/qp_model.hpp"
#include "asyncqp/types.hpp"

namespace asyncqp {

enum class SpectrumLaw { Uniform, LogUniform };

/// Recipe for a random QP instance with prescribed extreme spectrum.
struct GenSpec {
    int n = 0;
    int num_agents = 1;              // even split unless block_sizes given
    std::vector<int> block_sizes;    // optional explicit partition
    double norm2 = 1.0;              // target ||Q||_2
    double cond = 1.0;               // target condition number
    SpectrumLaw spectrum = SpectrumLaw::LogUniform;
    double r_norm = 0.0;             // target ||r||_2 (ignored if r_explicit set)
    std::vector<double> r_explicit;  // optional passthrough
    std::uint64_t seed = 0;

    void validate() const;
};

/// Blocks of size ceil(n/N) or floor(n/N); the first (n mod N) blocks are the
/// larger ones.
BlockPartition even_partition(int n, int num_agents);

/// Haar-like random orthogonal matrix: QR of a Gaussian matrix with the sign
/// of R's diagonal fixed.
Matrix random_orthogonal(int n, std::uint64_t seed);

/// Q = U diag(lambda) U' with lambda_1 = norm2, lambda_n = norm2 / cond and
/// interior eigenvalues drawn by the chosen law. cond = 1 returns norm2 * I
/// exactly.
Matrix generate_q(const GenSpec& spec);

/// Gaussian direction scaled to hit the target ||r||_2 exactly, or the
/// explicit vector passed through.
Vector generate_r(const GenSpec& spec);

/// Full problem from a spec: generate_q + generate_r + partition.
QuadraticProblem generate_problem(const GenSpec& spec);

}  // namespace asyncqp
