#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "pvrec/similarity.hpp"

namespace pvrec {

using FactorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct AlsConfig {
    std::size_t factors = 100;
    double lambda = 500.0;
    double alpha = 40.0;
    std::size_t steps = 15;
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument on factors/steps of zero or negative
    /// lambda/alpha.
    void validate() const;
};

/// Latent factors for implicit feedback. Preference p_ui is 1 for observed
/// pairs, 0 otherwise, with confidence c_ui = 1 + alpha * r_ui.
struct FactorModel {
    AlsConfig config;
    FactorMatrix user_factors;  // |U| x f
    FactorMatrix item_factors;  // |E| x f
    std::vector<bool> user_trained;
    std::vector<bool> item_trained;
    /// Objective after each full sweep.
    std::vector<double> objective_trace;

    double score(std::size_t user, std::size_t item) const {
        return user_factors.row(static_cast<Eigen::Index>(user)).dot(item_factors.row(static_cast<Eigen::Index>(item)));
    }
};

/// sum_{u,i} c_ui (p_ui - x_u.y_i)^2 + lambda (sum |x_u|^2 + sum |y_i|^2)
double als_objective(const InteractionMatrix& m, const FactorMatrix& x, const FactorMatrix& y, double lambda,
                     double alpha);

/// Analytic gradient of `als_objective` with respect to both factor matrices.
void als_gradient(const InteractionMatrix& m, const FactorMatrix& x, const FactorMatrix& y, double lambda,
                  double alpha, FactorMatrix& grad_x, FactorMatrix& grad_y);

/// Factors start uniform in [0, 0.01) from the seed; each sweep solves the
/// exact normal equations for every user with items fixed, then for every
/// item with users fixed. Throws std::runtime_error if the factors stop being
/// finite.
FactorModel als_train(const InteractionMatrix& m, const AlsConfig& cfg, unsigned threads = 1);

}  // namespace pvrec
