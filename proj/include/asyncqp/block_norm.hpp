#pragma once

#include <limits>
#include <vector>

#include "asyncqp/qp_model.hpp"
#include "asyncqp/types.hpp"

namespace asyncqp {

/// Weighted block-maximum norm parameters: block i is measured in the
/// p_i-norm and divided by omega_i >= 1. p_i = infinity is represented
/// exactly (std::numeric_limits<double>::infinity()).
struct NormScheme {
    std::vector<double> weights;    // omega_i >= 1
    std::vector<double> exponents;  // p_i in [1, inf]

    static NormScheme uniform(int num_blocks, double weight = 1.0,
                              double exponent = std::numeric_limits<double>::infinity());

    void validate(int num_blocks) const;
    void validate_values() const;
    double omega_min() const;
    double p_min() const;
};

/// ||v||_p for p in [1, inf].
double lp_norm(const Vector& v, double p);

/// max_i ||x_i||_{p_i} / omega_i
double block_max_norm(const Vector& x, const BlockPartition& partition, const NormScheme& scheme);

/// The constant the contraction analysis uses to convert a Euclidean-norm
/// contraction into block-maximum-norm decay:
/// n^(1/p_min - 1/2) * ||B||_2 / omega_min when p_min < 2, else
/// ||B||_2 / omega_min. Always >= sup_x ||Bx||_max / ||x||_2.
double induced_norm_bound(const Matrix& b, const NormScheme& scheme);

/// D_o: the worst block-maximum distance to x_hat over all agents' initial
/// local copies.
double initial_radius(const std::vector<Vector>& states, const Vector& x_hat,
                      const BlockPartition& partition, const NormScheme& scheme);

/// Index of the innermost nested set X(s) = {y : ||y - x_hat||_max <= q^s n D_o}
/// containing y. Distances at or below 1e-12 * n * D_o count as converged;
/// points outside X(0) are outside.
struct SetIndex {
    enum class Kind { Outside, Index, Converged };
    Kind kind = Kind::Outside;
    long s = 0;  // valid when kind == Index

    static SetIndex outside() { return {Kind::Outside, 0}; }
    static SetIndex converged() { return {Kind::Converged, 0}; }
    static SetIndex at(long s) { return {Kind::Index, s}; }

    bool operator==(const SetIndex&) const = default;

    /// Orders by progress: outside < any index < converged; larger index is
    /// further in.
    bool worse_than(const SetIndex& other) const;
};

SetIndex set_index_from_distance(double distance, double q, int n, double d_o);

SetIndex set_index(const Vector& y, const Vector& x_hat, double q, int n, double d_o,
                   const NormScheme& scheme, const BlockPartition& partition);

}  // namespace asyncqp
