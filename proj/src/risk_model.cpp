#include "frontier/risk_model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "frontier/error.hpp"

namespace frontier {

std::size_t default_factor_count(std::size_t num_risky) {
    if (num_risky <= 1) return 1;
    return std::min(kDefaultFactors, num_risky - 1);
}

Eigen::MatrixXd FactorRiskModel::covariance() const {
    Eigen::MatrixXd out = loadings * factor_variances.asDiagonal() * loadings.transpose();
    out.diagonal() += idiosyncratic;
    return out;
}

Eigen::MatrixXd trailing_covariance(const ReturnsPanel& returns, std::size_t t, std::size_t window) {
    if (window < 1) throw ConfigError("covariance window must be positive");
    // returns for panel dates t-window .. t-1 live in rows t-window-1 .. t-2
    if (t < window + 1) {
        throw HistoryError("insufficient history: covariance needs " + std::to_string(window) +
                           " prior returns at index " + std::to_string(t));
    }
    if (t - 1 > returns.num_periods()) throw HistoryError("covariance index past end of returns");

    const auto n = returns.simple.cols() - 1;
    const auto w = static_cast<Eigen::Index>(window);
    const auto block = returns.simple.block(static_cast<Eigen::Index>(t - window - 1), 0, w, n);
    const Eigen::RowVectorXd mean = block.colwise().mean();
    const Eigen::MatrixXd centered = block.rowwise() - mean;

    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n + 1, n + 1);
    cov.topLeftCorner(n, n) = (centered.transpose() * centered) / static_cast<double>(window);
    // exact symmetry for the eigensolver
    cov.topLeftCorner(n, n) = 0.5 * (cov.topLeftCorner(n, n) + cov.topLeftCorner(n, n).transpose()).eval();
    return cov;
}

FactorRiskModel fit_factor_model(const Eigen::MatrixXd& cov, std::size_t k) {
    const auto m = cov.rows();
    if (cov.cols() != m || m == 0) throw DimensionError("covariance must be square and non-empty");
    if (k < 1 || k > static_cast<std::size_t>(m)) {
        throw ConfigError("factor count " + std::to_string(k) + " out of range 1.." + std::to_string(m));
    }
    if (!cov.allFinite()) throw NumericalError("covariance has non-finite entries");
    const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw DataError("asymmetric covariance matrix");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    const Eigen::VectorXd& values = eig.eigenvalues();
    const Eigen::MatrixXd& vectors = eig.eigenvectors();
    if (values.minCoeff() < -1e-8 * scale) throw DataError("covariance is not positive semidefinite");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return values(i) > values(j); });

    const auto kk = static_cast<Eigen::Index>(k);
    FactorRiskModel model;
    model.loadings.resize(m, kk);
    model.factor_variances.resize(kk);
    model.idiosyncratic = Eigen::VectorXd::Zero(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(j)];
        const double lambda = std::max(0.0, values(src));
        if (j < kk) {
            model.loadings.col(j) = vectors.col(src);
            model.factor_variances(j) = lambda;
        } else {
            model.idiosyncratic += lambda * vectors.col(src).cwiseAbs2();
        }
    }
    return model;
}

FactorRiskModel with_cash_slot(const FactorRiskModel& risky) {
    const auto m = risky.loadings.rows();
    FactorRiskModel out;
    out.loadings = Eigen::MatrixXd::Zero(m + 1, risky.loadings.cols());
    out.loadings.topRows(m) = risky.loadings;
    out.factor_variances = risky.factor_variances;
    out.idiosyncratic = Eigen::VectorXd::Zero(m + 1);
    out.idiosyncratic.head(m) = risky.idiosyncratic;
    return out;
}

FactorRiskModel estimate_risk_model(const ReturnsPanel& returns, std::size_t t, std::size_t k,
                                    std::size_t window) {
    const Eigen::MatrixXd cov = trailing_covariance(returns, t, window);
    const auto n = cov.rows() - 1;
    return with_cash_slot(fit_factor_model(cov.topLeftCorner(n, n), k));
}

namespace {

void check_size(const FactorRiskModel& model, const Eigen::VectorXd& h) {
    if (static_cast<std::size_t>(h.size()) != model.dimension()) {
        throw DimensionError("holdings have " + std::to_string(h.size()) + " entries, risk model expects " +
                             std::to_string(model.dimension()));
    }
}

}  // namespace

double quadratic_risk(const FactorRiskModel& model, const Eigen::VectorXd& holdings) {
    check_size(model, holdings);
    const Eigen::VectorXd exposure = model.loadings.transpose() * holdings;
    return exposure.cwiseAbs2().dot(model.factor_variances) +
           holdings.cwiseAbs2().dot(model.idiosyncratic);
}

Eigen::VectorXd covariance_times(const FactorRiskModel& model, const Eigen::VectorXd& holdings) {
    check_size(model, holdings);
    const Eigen::VectorXd exposure = model.loadings.transpose() * holdings;
    return model.loadings * model.factor_variances.cwiseProduct(exposure) +
           model.idiosyncratic.cwiseProduct(holdings);
}

Eigen::VectorXd quadratic_risk_gradient(const FactorRiskModel& model, const Eigen::VectorXd& holdings) {
    return 2.0 * covariance_times(model, holdings);
}

}  // namespace frontier
