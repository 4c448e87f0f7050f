#pragma once

#include <cstdint>
#include <vector>

#include "asyncqp/qp_model.hpp"
#include "asyncqp/types.hpp"

namespace asyncqp {

/// Open interval of admissible per-agent stepsizes. Every selection of
/// gamma_i strictly inside it gives ||I - Gamma Q||_2 < 1. The lower
/// endpoint is 0 exactly when cond = 1.
struct StepsizeInterval {
    double lower = 0.0;
    double upper = 0.0;

    bool contains(double gamma) const { return gamma > lower && gamma < upper; }
    double width() const { return upper - lower; }
};

/// Per-agent stepsizes gamma_1..gamma_N; the implied matrix is
/// Gamma = diag(gamma_1 I_{n_1}, ..., gamma_N I_{n_N}).
struct GammaMatrix {
    std::vector<double> gammas;

    Vector diagonal(const BlockPartition& partition) const;
    void validate() const;  // all gamma_i > 0
};

/// Joint regularization plan: any per-agent alphas drawn strictly inside
/// (alpha_lower, alpha_upper) keep the condition number of Q+A at or below
/// k_D and the solution error e_A at or below epsilon.
struct RegularizationPlan {
    double alpha_lower = 0.0;  // exclusive
    double alpha_upper = 0.0;  // exclusive
    double k_d = 0.0;
    double epsilon = 0.0;
    double predicted_error_bound = 0.0;
    // Stepsize interval for the regularized problem from the operator bounds
    // ||Q+A||_2 <= ||Q||_2 + alpha_upper and cond(Q+A) <= k_D.
    StepsizeInterval predicted_stepsizes;
    double reg_norm2_bound = 0.0;  // the ||Q+A||_2 bound the interval used
};

/// Admissible stepsize interval ((sqrt(k)-1)/(L sqrt(k)), (sqrt(k)+1)/(L sqrt(k)))
/// for L = ||Q||_2 and k = cond(Q). Both arguments may be conservative upper
/// bounds; the interval stays valid.
StepsizeInterval stepsize_interval(double norm2, double cond);

/// True iff (gamma_lower, gamma_upper) is certified as a valid stepsize
/// interval by the contraction inequality
/// (1 / (2 gamma_u L)) ((sqrt(k)+1)^2/sqrt(k) - (gamma_u/gamma_l)(sqrt(k)-1)^2/sqrt(k)) > 1.
bool validate_interval(double gamma_lower, double gamma_upper, double norm2, double cond);

/// q = ||I - Gamma Q||_2, computed through the largest eigenvalue of the
/// symmetric product (I - Gamma Q)'(I - Gamma Q) since I - Gamma Q is not
/// symmetric for heterogeneous stepsizes.
double contraction_factor(const Matrix& q, const GammaMatrix& gamma,
                          const BlockPartition& partition);

/// Sufficient condition of strict conditioning improvement:
/// alpha_max / alpha_min < k_Q implies cond(Q+A) < cond(Q).
bool improves_conditioning(const RegularizationChoice& choice, double cond_q);

/// Strict lower bound on admissible target condition numbers k_D:
/// k_D > k_Q - epsilon ||Q||_2 (k_Q - 1) / (||r||_2 k_Q).
double feasible_kd_lower(double cond_q, double norm2, double norm_r, double epsilon);

/// Strict lower bound on alpha_min guaranteeing cond(Q+A) <= k_D.
double alpha_min_lower(double cond_q, double norm2, double norm_r, double epsilon, double k_d);

/// Strict upper bound on alpha_max guaranteeing e_A <= epsilon.
double alpha_max_upper(double cond_q, double norm2, double norm_r, double epsilon);

/// Bound on the regularization error ||x_hat - x_hat_A||_2:
/// ||r||_2 k_Q^2 alpha_max / (||Q||_2^2 + ||Q||_2 k_Q alpha_max).
double error_bound(double cond_q, double norm2, double norm_r, double alpha_max);

RegularizationPlan plan_regularization(double cond_q, double norm2, double norm_r,
                                       double epsilon, double k_d);

/// Uniform draw strictly inside an open interval; the endpoints are nudged
/// inward by 1e-12 of the width so a draw can never land on them.
double sample_open(double lower, double upper, double u01);

std::vector<double> sample_stepsizes(const StepsizeInterval& interval, int count,
                                     std::uint64_t seed);

std::vector<double> sample_alphas(const RegularizationPlan& plan, int count, std::uint64_t seed);

}  // namespace asyncqp
