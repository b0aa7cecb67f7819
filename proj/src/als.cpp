#include "pvrec/als.hpp"

#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "pvrec/parallel.hpp"

namespace pvrec {

void AlsConfig::validate() const {
    if (factors == 0) throw std::invalid_argument("ALS needs at least one factor");
    if (steps == 0) throw std::invalid_argument("ALS needs at least one training step");
    if (!(lambda >= 0.0) || !(alpha >= 0.0)) throw std::invalid_argument("lambda and alpha must be non-negative");
}

namespace {

using Gram = Eigen::MatrixXd;

Gram gram(const FactorMatrix& m) { return m.transpose() * m; }

// Solves every row of `target` given the fixed factors on the other side.
// rows(r) lists the observed partners of row r.
template <class Rows>
void solve_side(FactorMatrix& target, const FactorMatrix& fixed, std::size_t count, Rows rows, double lambda,
                double alpha, unsigned threads) {
    const auto f = fixed.cols();
    const Gram base = gram(fixed) + lambda * Gram::Identity(f, f);
    parallel_for(count, threads, [&](std::size_t r) {
        Gram a = base;
        Eigen::VectorXd b = Eigen::VectorXd::Zero(f);
        for (auto j : rows(r)) {
            const auto yj = fixed.row(j).transpose();
            a.noalias() += alpha * yj * yj.transpose();
            b.noalias() += (1.0 + alpha) * yj;
        }
        target.row(static_cast<Eigen::Index>(r)) = a.ldlt().solve(b).transpose();
    });
    if (!target.allFinite()) {
        throw std::runtime_error("ALS produced non-finite factors; check lambda and the data scale");
    }
}

}  // namespace

double als_objective(const InteractionMatrix& m, const FactorMatrix& x, const FactorMatrix& y, double lambda,
                     double alpha) {
    // all pairs as if unobserved, then correct the observed ones
    double total = gram(x).cwiseProduct(gram(y)).sum();
    for (std::size_t u = 0; u < m.user_count(); ++u) {
        for (auto i : m.row(u)) {
            const double s = x.row(static_cast<Eigen::Index>(u)).dot(y.row(i));
            total += (1.0 + alpha) * (1.0 - s) * (1.0 - s) - s * s;
        }
    }
    return total + lambda * (x.squaredNorm() + y.squaredNorm());
}

void als_gradient(const InteractionMatrix& m, const FactorMatrix& x, const FactorMatrix& y, double lambda,
                  double alpha, FactorMatrix& grad_x, FactorMatrix& grad_y) {
    // d/dx_u = 2 (Y'Y x_u + sum_obs (alpha s - (1 + alpha)) y_i + lambda x_u)
    grad_x = x * gram(y) + lambda * x;
    grad_y = y * gram(x) + lambda * y;
    for (std::size_t u = 0; u < m.user_count(); ++u) {
        const auto ur = static_cast<Eigen::Index>(u);
        for (auto i : m.row(u)) {
            const double s = x.row(ur).dot(y.row(i));
            const double coef = alpha * s - (1.0 + alpha);
            grad_x.row(ur) += coef * y.row(i);
            grad_y.row(i) += coef * x.row(ur);
        }
    }
    grad_x *= 2.0;
    grad_y *= 2.0;
}

FactorModel als_train(const InteractionMatrix& m, const AlsConfig& cfg, unsigned threads) {
    cfg.validate();
    const auto f = static_cast<Eigen::Index>(cfg.factors);
    FactorModel model;
    model.config = cfg;
    model.user_factors.resize(static_cast<Eigen::Index>(m.user_count()), f);
    model.item_factors.resize(static_cast<Eigen::Index>(m.item_count()), f);

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> init(0.0, 0.01);
    for (Eigen::Index r = 0; r < model.user_factors.rows(); ++r) {
        for (Eigen::Index c = 0; c < f; ++c) model.user_factors(r, c) = init(rng);
    }
    for (Eigen::Index r = 0; r < model.item_factors.rows(); ++r) {
        for (Eigen::Index c = 0; c < f; ++c) model.item_factors(r, c) = init(rng);
    }

    model.user_trained.resize(m.user_count());
    for (std::size_t u = 0; u < m.user_count(); ++u) model.user_trained[u] = !m.row(u).empty();
    model.item_trained.resize(m.item_count());
    for (std::size_t i = 0; i < m.item_count(); ++i) model.item_trained[i] = !m.column(i).empty();

    for (std::size_t step = 0; step < cfg.steps; ++step) {
        solve_side(model.user_factors, model.item_factors, m.user_count(), [&](std::size_t u) { return m.row(u); },
                   cfg.lambda, cfg.alpha, threads);
        solve_side(model.item_factors, model.user_factors, m.item_count(), [&](std::size_t i) { return m.column(i); },
                   cfg.lambda, cfg.alpha, threads);
        model.objective_trace.push_back(
            als_objective(m, model.user_factors, model.item_factors, cfg.lambda, cfg.alpha));
    }
    return model;
}

}  // namespace pvrec
