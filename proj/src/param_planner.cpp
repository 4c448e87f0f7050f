#include "asyncqp/param_planner.hpp"

#include <cmath>
#include <sstream>

#include "asyncqp/rng.hpp"

namespace asyncqp {

namespace {

void check_spectral_args(double norm2, double cond, const char* who) {
    if (!(norm2 > 0.0)) throw InfeasibleError(std::string(who) + ": requires ||Q||_2 > 0");
    if (!(cond >= 1.0)) throw InfeasibleError(std::string(who) + ": requires cond >= 1");
}

std::string violated(const char* inequality, double lhs, double rhs) {
    std::ostringstream os;
    os << "violated " << inequality << " (" << lhs << " vs " << rhs << ")";
    return os.str();
}

void check_epsilon_range(double cond_q, double norm2, double norm_r, double epsilon,
                         const char* who) {
    const double cap = norm_r * cond_q / norm2;
    if (!(epsilon > 0.0))
        throw InfeasibleError(std::string(who) + ": requires epsilon > 0");
    if (!(epsilon < cap))
        throw InfeasibleError(std::string(who) + ": " +
                              violated("epsilon < ||r||_2 k_Q / ||Q||_2", epsilon, cap));
}

}  // namespace

Vector GammaMatrix::diagonal(const BlockPartition& partition) const {
    return expand_blockwise(gammas, partition);
}

void GammaMatrix::validate() const {
    if (gammas.empty()) throw std::invalid_argument("no stepsizes");
    for (double g : gammas)
        if (!(g > 0.0)) throw std::invalid_argument("all gamma_i must be > 0");
}

StepsizeInterval stepsize_interval(double norm2, double cond) {
    check_spectral_args(norm2, cond, "stepsize_interval");
    const double rk = std::sqrt(cond);
    return {(rk - 1.0) / (norm2 * rk), (rk + 1.0) / (norm2 * rk)};
}

bool validate_interval(double gamma_lower, double gamma_upper, double norm2, double cond) {
    check_spectral_args(norm2, cond, "validate_interval");
    if (!(gamma_lower > 0.0) || !(gamma_upper >= gamma_lower))
        throw std::invalid_argument("validate_interval: requires 0 < gamma_lower <= gamma_upper");
    const double rk = std::sqrt(cond);
    const double lhs = (1.0 / (2.0 * gamma_upper * norm2)) *
                       ((rk + 1.0) * (rk + 1.0) / rk -
                        (gamma_upper / gamma_lower) * (rk - 1.0) * (rk - 1.0) / rk);
    return lhs > 1.0;
}

double contraction_factor(const Matrix& q, const GammaMatrix& gamma,
                          const BlockPartition& partition) {
    if (q.rows() != partition.total() || q.cols() != partition.total())
        throw std::invalid_argument("contraction_factor: dimension mismatch");
    gamma.validate();
    Matrix m = gamma.diagonal(partition).asDiagonal() * q;
    m = Matrix::Identity(q.rows(), q.cols()) - m;
    return spectral_norm(m);
}

bool improves_conditioning(const RegularizationChoice& choice, double cond_q) {
    for (double a : choice.alphas)
        if (!(a > 0.0)) throw std::invalid_argument("all alpha_i must be > 0");
    return choice.alpha_max() / choice.alpha_min() < cond_q;
}

double feasible_kd_lower(double cond_q, double norm2, double norm_r, double epsilon) {
    check_spectral_args(norm2, cond_q, "feasible_kd_lower");
    if (!(norm_r > 0.0)) throw InfeasibleError("feasible_kd_lower: requires ||r||_2 > 0");
    check_epsilon_range(cond_q, norm2, norm_r, epsilon, "feasible_kd_lower");
    return cond_q - epsilon * norm2 * (cond_q - 1.0) / (norm_r * cond_q);
}

double alpha_min_lower(double cond_q, double norm2, double norm_r, double epsilon, double k_d) {
    const double kd_lo = feasible_kd_lower(cond_q, norm2, norm_r, epsilon);
    if (!(k_d > kd_lo))
        throw InfeasibleError("alpha_min_lower: " +
                              violated("k_D > k_Q - epsilon ||Q||_2 (k_Q - 1) / (||r||_2 k_Q)",
                                       k_d, kd_lo));
    return norm2 * (1.0 / k_d - 1.0 / cond_q) +
           epsilon * norm2 * norm2 / (cond_q * k_d * (norm_r * cond_q - epsilon * norm2));
}

double alpha_max_upper(double cond_q, double norm2, double norm_r, double epsilon) {
    check_spectral_args(norm2, cond_q, "alpha_max_upper");
    if (!(norm_r > 0.0)) throw InfeasibleError("alpha_max_upper: requires ||r||_2 > 0");
    check_epsilon_range(cond_q, norm2, norm_r, epsilon, "alpha_max_upper");
    return epsilon * norm2 * norm2 / (norm_r * cond_q * cond_q - epsilon * norm2 * cond_q);
}

double error_bound(double cond_q, double norm2, double norm_r, double alpha_max) {
    check_spectral_args(norm2, cond_q, "error_bound");
    if (!(norm_r >= 0.0) || !(alpha_max >= 0.0))
        throw std::invalid_argument("error_bound: requires ||r||_2 >= 0 and alpha_max >= 0");
    return norm_r * cond_q * cond_q * alpha_max / (norm2 * norm2 + norm2 * cond_q * alpha_max);
}

RegularizationPlan plan_regularization(double cond_q, double norm2, double norm_r,
                                       double epsilon, double k_d) {
    RegularizationPlan plan;
    plan.k_d = k_d;
    plan.epsilon = epsilon;
    plan.alpha_lower = alpha_min_lower(cond_q, norm2, norm_r, epsilon, k_d);
    plan.alpha_upper = alpha_max_upper(cond_q, norm2, norm_r, epsilon);
    if (!(plan.alpha_lower < plan.alpha_upper))
        throw InfeasibleError("plan_regularization: empty interval, " +
                              violated("alpha_min bound < alpha_max bound", plan.alpha_lower,
                                       plan.alpha_upper));
    plan.predicted_error_bound = error_bound(cond_q, norm2, norm_r, plan.alpha_upper);
    plan.reg_norm2_bound = norm2 + plan.alpha_upper;
    plan.predicted_stepsizes = stepsize_interval(plan.reg_norm2_bound, k_d);
    return plan;
}

double sample_open(double lower, double upper, double u01) {
    const double shift = 1e-12 * (upper - lower);
    return (lower + shift) + (upper - lower - 2.0 * shift) * u01;
}

std::vector<double> sample_stepsizes(const StepsizeInterval& interval, int count,
                                     std::uint64_t seed) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] =
            sample_open(interval.lower, interval.upper,
                        counter_u01(seed, static_cast<std::uint64_t>(i), 0x67616d6dULL));
    return out;
}

std::vector<double> sample_alphas(const RegularizationPlan& plan, int count, std::uint64_t seed) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] =
            sample_open(plan.alpha_lower, plan.alpha_upper,
                        counter_u01(seed, static_cast<std::uint64_t>(i), 0x616c7068ULL));
    return out;
}

}  // namespace asyncqp
