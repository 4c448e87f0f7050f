#include "asyncqp/block_norm.hpp"

#include <algorithm>
#include <cmath>

namespace asyncqp {

NormScheme NormScheme::uniform(int num_blocks, double weight, double exponent) {
    NormScheme scheme;
    scheme.weights.assign(static_cast<std::size_t>(num_blocks), weight);
    scheme.exponents.assign(static_cast<std::size_t>(num_blocks), exponent);
    return scheme;
}

void NormScheme::validate(int num_blocks) const {
    if (static_cast<int>(weights.size()) != num_blocks ||
        static_cast<int>(exponents.size()) != num_blocks)
        throw std::invalid_argument("norm scheme does not match block count");
    validate_values();
}

void NormScheme::validate_values() const {
    if (weights.empty() || weights.size() != exponents.size())
        throw std::invalid_argument("norm scheme is empty or ragged");
    for (double w : weights)
        if (!(w >= 1.0)) throw std::invalid_argument("norm weights must be >= 1");
    for (double p : exponents)
        if (!(p >= 1.0)) throw std::invalid_argument("norm exponents must be in [1, inf]");
}

double NormScheme::omega_min() const {
    return *std::min_element(weights.begin(), weights.end());
}

double NormScheme::p_min() const {
    return *std::min_element(exponents.begin(), exponents.end());
}

double lp_norm(const Vector& v, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be in [1, inf]");
    if (v.size() == 0) return 0.0;
    if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
    if (p == 1.0) return v.cwiseAbs().sum();
    if (p == 2.0) return v.norm();
    // scale out the max to avoid overflow for large p
    const double m = v.cwiseAbs().maxCoeff();
    if (m == 0.0) return 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v(i)) / m, p);
    return m * std::pow(acc, 1.0 / p);
}

double block_max_norm(const Vector& x, const BlockPartition& partition, const NormScheme& scheme) {
    if (x.size() != partition.total())
        throw std::invalid_argument("block_max_norm: dimension mismatch");
    scheme.validate(partition.num_blocks());
    double worst = 0.0;
    for (int i = 0; i < partition.num_blocks(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const double bn =
            lp_norm(x.segment(partition.start(i), partition.size(i)), scheme.exponents[idx]) /
            scheme.weights[idx];
        worst = std::max(worst, bn);
    }
    return worst;
}

double induced_norm_bound(const Matrix& b, const NormScheme& scheme) {
    scheme.validate_values();
    const double p_min = scheme.p_min();
    const double norm2 = spectral_norm(b);
    const double omega_min = scheme.omega_min();
    if (p_min < 2.0) {
        const double inv_p = std::isinf(p_min) ? 0.0 : 1.0 / p_min;
        return std::pow(static_cast<double>(b.rows()), inv_p - 0.5) * norm2 / omega_min;
    }
    return norm2 / omega_min;
}

double initial_radius(const std::vector<Vector>& states, const Vector& x_hat,
                      const BlockPartition& partition, const NormScheme& scheme) {
    if (states.empty()) throw std::invalid_argument("initial_radius: no states");
    double worst = 0.0;
    for (const Vector& x : states) {
        if (x.size() != x_hat.size())
            throw std::invalid_argument("initial_radius: dimension mismatch");
        worst = std::max(worst, block_max_norm(x - x_hat, partition, scheme));
    }
    return worst;
}

bool SetIndex::worse_than(const SetIndex& other) const {
    if (kind == other.kind) return kind == Kind::Index && s < other.s;
    if (kind == Kind::Outside) return true;
    if (kind == Kind::Converged) return false;
    return other.kind == Kind::Converged;
}

SetIndex set_index_from_distance(double distance, double q, int n, double d_o) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("set_index requires q in (0, 1)");
    if (!(d_o > 0.0)) throw std::invalid_argument("set_index requires D_o > 0");
    const double radius0 = static_cast<double>(n) * d_o;
    if (distance <= 1e-12 * radius0) return SetIndex::converged();
    if (distance > radius0) return SetIndex::outside();
    // log estimate, then fix up by direct power comparison so floating-point
    // boundary cases land on the exact membership test
    long s = static_cast<long>(std::floor(std::log(distance / radius0) / std::log(q)));
    if (s < 0) s = 0;
    while (s > 0 && std::pow(q, static_cast<double>(s)) * radius0 < distance) --s;
    while (std::pow(q, static_cast<double>(s + 1)) * radius0 >= distance) ++s;
    return SetIndex::at(s);
}

SetIndex set_index(const Vector& y, const Vector& x_hat, double q, int n, double d_o,
                   const NormScheme& scheme, const BlockPartition& partition) {
    return set_index_from_distance(block_max_norm(y - x_hat, partition, scheme), q, n, d_o);
}

}  // namespace asyncqp
