#include "frontier/optimizer.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "frontier/error.hpp"

namespace frontier {

void InvestorPreferences::validate() const {
    if (!(gamma_risk >= 0.0) || !std::isfinite(gamma_risk)) throw ConfigError("gamma_risk must be >= 0");
    if (!(gamma_trade >= 0.0) || !std::isfinite(gamma_trade)) throw ConfigError("gamma_trade must be >= 0");
}

TradeProblem::TradeProblem(Eigen::VectorXd current_weights, std::vector<PlanningPeriod> periods,
                           InvestorPreferences prefs, ConstraintSet constraints)
    : weights_(std::move(current_weights)), periods_(std::move(periods)), prefs_(prefs) {
    prefs_.validate();
    if (!constraints.long_only || !constraints.fully_invested || !constraints.self_financing) {
        throw ConfigError("unsupported constraint combination: long-only, fully-invested and "
                          "self-financing must all be enabled");
    }
    if (periods_.empty()) throw ConfigError("planning horizon must be >= 1");
    const auto m = weights_.size();
    if (m < 2) throw DimensionError("need at least one risky asset plus cash");
    if (!weights_.allFinite() || std::abs(weights_.sum() - 1.0) > 1e-9 || (weights_.array() < -1e-9).any()) {
        throw DataError("infeasible problem: current weights are not on the simplex");
    }
    for (const auto& p : periods_) {
        if (p.forecast.size() != m) throw DimensionError("forecast length does not match weights");
        if (!p.forecast.allFinite()) throw NumericalError("non-finite forecast");
        if (!p.risk || static_cast<Eigen::Index>(p.risk->dimension()) != m) {
            throw DimensionError("risk model dimension does not match weights");
        }
        if (static_cast<Eigen::Index>(p.costs.num_risky()) + 1 != m) {
            throw DimensionError("cost inputs do not match the number of risky assets");
        }
    }
}

double TradeProblem::objective(const std::vector<Eigen::VectorXd>& x) const {
    if (x.size() != periods_.size()) throw DimensionError("holdings do not match the horizon");
    double total = 0.0;
    for (std::size_t tau = 0; tau < x.size(); ++tau) {
        const auto& p = periods_[tau];
        const Eigen::VectorXd z = x[tau] - (tau == 0 ? weights_ : x[tau - 1]);
        total += p.forecast.dot(x[tau]) - prefs_.gamma_trade * p.costs.cost(z) -
                 prefs_.gamma_risk * quadratic_risk(*p.risk, x[tau]);
    }
    return total;
}

double TradeProblem::smooth_objective(const std::vector<Eigen::VectorXd>& x) const {
    double total = 0.0;
    for (std::size_t tau = 0; tau < x.size(); ++tau) {
        const auto& p = periods_[tau];
        const Eigen::VectorXd z = x[tau] - (tau == 0 ? weights_ : x[tau - 1]);
        total += p.forecast.dot(x[tau]) - prefs_.gamma_trade * p.costs.smooth_cost(z) -
                 prefs_.gamma_risk * quadratic_risk(*p.risk, x[tau]);
    }
    return total;
}

double TradeProblem::spread_penalty(const std::vector<Eigen::VectorXd>& x) const {
    double total = 0.0;
    for (std::size_t tau = 0; tau < x.size(); ++tau) {
        const auto& p = periods_[tau];
        const Eigen::VectorXd z = x[tau] - (tau == 0 ? weights_ : x[tau - 1]);
        const auto n = static_cast<Eigen::Index>(p.costs.num_risky());
        total += prefs_.gamma_trade * p.costs.params().a * z.head(n).cwiseAbs().sum();
    }
    return total;
}

std::vector<Eigen::VectorXd> TradeProblem::smooth_gradient(const std::vector<Eigen::VectorXd>& x) const {
    std::vector<Eigen::VectorXd> g(x.size());
    for (std::size_t tau = 0; tau < x.size(); ++tau) {
        const auto& p = periods_[tau];
        g[tau] = p.forecast - prefs_.gamma_risk * quadratic_risk_gradient(*p.risk, x[tau]);
    }
    for (std::size_t tau = 0; tau < x.size(); ++tau) {
        const Eigen::VectorXd z = x[tau] - (tau == 0 ? weights_ : x[tau - 1]);
        const Eigen::VectorXd dc = prefs_.gamma_trade * periods_[tau].costs.smooth_gradient(z);
        g[tau] -= dc;
        if (tau > 0) g[tau - 1] += dc;
    }
    return g;
}

namespace {

std::vector<PlanningPeriod> make_periods(const std::vector<Eigen::VectorXd>& forecasts,
                                         const std::shared_ptr<const FactorRiskModel>& risk,
                                         const CostInputs& cost_estimates, const CostParams& params) {
    const CostModel model(cost_estimates, params);
    std::vector<PlanningPeriod> periods;
    periods.reserve(forecasts.size());
    for (const auto& f : forecasts) periods.push_back(PlanningPeriod{f, risk, model});
    return periods;
}

}  // namespace

TradeProblem build_spo(const Eigen::VectorXd& forecast, const PortfolioState& state,
                       std::shared_ptr<const FactorRiskModel> risk, const CostInputs& cost_estimates,
                       const CostParams& params, const InvestorPreferences& prefs,
                       const ConstraintSet& constraints) {
    return TradeProblem(state.weights, make_periods({forecast}, risk, cost_estimates, params), prefs,
                        constraints);
}

TradeProblem build_mpo(const std::vector<Eigen::VectorXd>& forecasts, const PortfolioState& state,
                       std::shared_ptr<const FactorRiskModel> risk, const CostInputs& cost_estimates,
                       const CostParams& params, const InvestorPreferences& prefs,
                       const ConstraintSet& constraints, std::size_t horizon) {
    if (horizon < 1) throw ConfigError("planning horizon must be >= 1");
    if (forecasts.size() < horizon) {
        throw DimensionError("need " + std::to_string(horizon) + " forecasts, got " +
                             std::to_string(forecasts.size()));
    }
    const std::vector<Eigen::VectorXd> used(forecasts.begin(), forecasts.begin() + static_cast<long>(horizon));
    return TradeProblem(state.weights, make_periods(used, risk, cost_estimates, params), prefs, constraints);
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
    const auto m = v.size();
    Eigen::VectorXd u = v;
    std::sort(u.data(), u.data() + m, std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        cumulative += u(j);
        const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (u(j) - candidate > 0.0) theta = candidate;
    }
    return (v.array() - theta).cwiseMax(0.0).matrix();
}

namespace detail {

namespace {

double soft_coordinate(double y, double w, double kappa, double mu) {
    const double v = y - mu;
    double x;
    if (v > w + kappa) {
        x = v - kappa;
    } else if (v < w - kappa) {
        x = v + kappa;
    } else {
        x = w;
    }
    return std::max(0.0, x);
}

}  // namespace

Eigen::VectorXd prox_single_period(const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                   const Eigen::VectorXd& kappa) {
    const auto m = y.size();
    if (kappa.cwiseAbs().maxCoeff() == 0.0) return project_to_simplex(y);

    auto total = [&](double mu) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) s += soft_coordinate(y(i), w(i), kappa(i), mu);
        return s;
    };
    double lo = (y - kappa).maxCoeff() - 1.0;  // total(lo) >= 1
    double hi = (y + kappa).maxCoeff();        // total(hi) == 0
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (total(mid) >= 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // exact solve on the final linear piece
    const double mid = 0.5 * (lo + hi);
    double fixed = 0.0;
    double free_sum = 0.0;
    int free_count = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double v = y(i) - mid;
        if (v > w(i) + kappa(i) && v - kappa(i) > 0.0) {
            free_sum += y(i) - kappa(i);
            ++free_count;
        } else if (v < w(i) - kappa(i) && v + kappa(i) > 0.0) {
            free_sum += y(i) + kappa(i);
            ++free_count;
        } else if (v >= w(i) - kappa(i) && v <= w(i) + kappa(i)) {
            fixed += w(i);
        }
    }
    double mu = lo;
    if (free_count > 0) {
        const double exact = (free_sum + fixed - 1.0) / free_count;
        if (exact >= lo && exact <= hi) mu = exact;
    }
    Eigen::VectorXd x(m);
    for (Eigen::Index i = 0; i < m; ++i) x(i) = soft_coordinate(y(i), w(i), kappa(i), mu);
    return x;
}

namespace {

/// Box-dual FISTA for the chained prox; slow but needs no structure beyond convexity.
std::vector<Eigen::VectorXd> chained_prox_by_dual(const std::vector<Eigen::VectorXd>& y, const Eigen::VectorXd& w,
                                                  const Eigen::VectorXd& kappa) {
    const std::size_t horizon = y.size();
    const auto m = w.size();
    auto primal = [&](const std::vector<Eigen::VectorXd>& u) {
        std::vector<Eigen::VectorXd> x(horizon);
        for (std::size_t tau = 0; tau < horizon; ++tau) {
            Eigen::VectorXd v = y[tau] - u[tau];
            if (tau + 1 < horizon) v += u[tau + 1];
            x[tau] = project_to_simplex(v);
        }
        return x;
    };
    auto clip = [&](Eigen::VectorXd& u) { u = u.cwiseMax(-kappa).cwiseMin(kappa); };

    // step 1/|D|^2 >= 1/4 for the chain difference operator
    constexpr double step = 0.25;
    std::vector<Eigen::VectorXd> u(horizon, Eigen::VectorXd::Zero(m));
    std::vector<Eigen::VectorXd> v = u;
    double t = 1.0;
    const double stop = 1e-16 * std::max(1.0, kappa.maxCoeff());
    for (int it = 0; it < 20000; ++it) {
        const auto x = primal(v);
        std::vector<Eigen::VectorXd> next(horizon);
        double change = 0.0;
        double momentum_check = 0.0;
        for (std::size_t tau = 0; tau < horizon; ++tau) {
            const Eigen::VectorXd grad = x[tau] - (tau == 0 ? w : x[tau - 1]);
            next[tau] = v[tau] + step * grad;
            clip(next[tau]);
            change = std::max(change, (next[tau] - u[tau]).cwiseAbs().maxCoeff());
            momentum_check += (next[tau] - u[tau]).dot(v[tau] - next[tau]);
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = momentum_check > 0.0 ? 0.0 : (t - 1.0) / t_next;
        for (std::size_t tau = 0; tau < horizon; ++tau) v[tau] = next[tau] + beta * (next[tau] - u[tau]);
        t = momentum_check > 0.0 ? 1.0 : t_next;
        u = std::move(next);
        if (change <= stop) break;
    }
    return primal(u);
}

/**
 * min over x >= 0 of sum_k 1/2 (x_k - a_k)^2 + kappa sum_k |x_k - x_{k-1}| with x_0 = anchor.
 *
 * Forward pass: F_k(b) is the best partial cost with x_k = b, and
 * F_k'(b) = (b - a_k) + clamp(F_{k-1}'(b), -kappa, kappa). Knowing where each
 * F_j' crosses -kappa and +kappa is enough to invert F_k' exactly. The
 * backward pass clamps, and the nonnegative solution is the clipped one.
 */
class AnchoredChain {
public:
    explicit AnchoredChain(std::size_t horizon) : a_(horizon), lo_(horizon), hi_(horizon) {}

    /// Writes x and the first period of the group each x_k belongs to (0 when pinned to the anchor or to zero).
    void solve(double anchor, double kappa, double* x, std::size_t* group) {
        anchor_ = anchor;
        kappa_ = kappa;
        const std::size_t h = a_.size();
        for (std::size_t k = 1; k < h; ++k) {
            lo_[k] = root(k, -kappa);
            hi_[k] = root(k, kappa);
        }
        Crossing c = root(h, 0.0);
        std::size_t k = h;
        while (true) {
            for (std::size_t j = c.start == 0 ? 1 : c.start; j <= k; ++j) {
                x[j - 1] = std::max(0.0, c.value);
                group[j - 1] = c.value > 0.0 ? c.start : 0;
            }
            if (c.start <= 1) break;
            k = c.start - 1;
            c = c.value < lo_[k].value ? lo_[k] : hi_[k];
        }
    }

    std::vector<double>& targets() { return a_; }

private:
    struct Crossing {
        double value = 0.0;
        std::size_t start = 0;
    };

    /// Solves F_k'(b) = v. `start` is the first period fused with x_k, 0 for the anchor.
    Crossing root(std::size_t k, double v) const {
        double slope = 0.0;
        double rhs = v;
        for (std::size_t j = k; j >= 1; --j) {
            const double below = j == 1 ? anchor_ : lo_[j - 1].value;
            const double above = j == 1 ? anchor_ : hi_[j - 1].value;
            const double a = a_[j - 1];
            if ((slope + 1.0) * below - a - kappa_ >= rhs) return {(rhs + a + kappa_) / (slope + 1.0), j};
            if ((slope + 1.0) * above - a + kappa_ <= rhs) return {(rhs + a - kappa_) / (slope + 1.0), j};
            rhs += a;
            slope += 1.0;
        }
        return {anchor_, 0};
    }

    std::vector<double> a_;
    std::vector<Crossing> lo_;
    std::vector<Crossing> hi_;
    double anchor_ = 0.0;
    double kappa_ = 0.0;
};

/// Per-coordinate chain solutions for fixed budget multipliers, with the dual value and its curvature.
struct ChainEvaluation {
    std::vector<Eigen::VectorXd> x;
    Eigen::VectorXd sums;
    Eigen::MatrixXd curvature;
    double dual = 0.0;
};

ChainEvaluation evaluate_chain(const std::vector<Eigen::VectorXd>& y, const Eigen::VectorXd& w,
                               const Eigen::VectorXd& kappa, const Eigen::VectorXd& mu) {
    const std::size_t h = y.size();
    const auto m = w.size();
    const auto hh = static_cast<Eigen::Index>(h);
    ChainEvaluation e;
    e.x.assign(h, Eigen::VectorXd(m));
    e.sums = Eigen::VectorXd::Zero(hh);
    e.curvature = Eigen::MatrixXd::Zero(hh, hh);
    AnchoredChain chain(h);
    std::vector<double> xi(h);
    std::vector<std::size_t> group(h);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < h; ++k) chain.targets()[k] = y[k](i) - mu(static_cast<Eigen::Index>(k));
        chain.solve(w(i), kappa(i), xi.data(), group.data());
        double previous = w(i);
        for (std::size_t k = 0; k < h; ++k) {
            e.x[k](i) = xi[k];
            e.sums(static_cast<Eigen::Index>(k)) += xi[k];
            const double d = xi[k] - y[k](i);
            e.dual += 0.5 * d * d + kappa(i) * std::abs(xi[k] - previous);
            previous = xi[k];
        }
        for (std::size_t k = 0; k < h;) {
            std::size_t end = k + 1;
            while (end < h && group[end] == group[k] && group[k] != 0) ++end;
            if (group[k] != 0) {
                const double share = 1.0 / static_cast<double>(end - k);
                const auto b = static_cast<Eigen::Index>(k), len = static_cast<Eigen::Index>(end - k);
                e.curvature.block(b, b, len, len).array() += share;
            }
            k = end;
        }
    }
    e.dual += mu.dot((e.sums.array() - 1.0).matrix());
    return e;
}

double simplex_threshold(const Eigen::VectorXd& v) {
    Eigen::VectorXd u = v;
    std::sort(u.data(), u.data() + u.size(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        cumulative += u(j);
        const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (u(j) - candidate > 0.0) theta = candidate;
    }
    return theta;
}

}  // namespace

std::vector<Eigen::VectorXd> prox_multi_period(const std::vector<Eigen::VectorXd>& y, const Eigen::VectorXd& w,
                                               const Eigen::VectorXd& kappa, Eigen::VectorXd& multipliers) {
    const std::size_t horizon = y.size();
    if (horizon == 1) return {prox_single_period(y[0], w, kappa)};
    const auto hh = static_cast<Eigen::Index>(horizon);
    if (multipliers.size() != hh || !multipliers.allFinite()) {
        multipliers.resize(hh);
        for (std::size_t k = 0; k < horizon; ++k) multipliers(static_cast<Eigen::Index>(k)) = simplex_threshold(y[k]);
    }

    // Newton directions on the concave dual of the budget constraints, each followed by an exact line
    // search: the directional derivative is the budget residual projected on the direction
    ChainEvaluation e = evaluate_chain(y, w, kappa, multipliers);
    auto residual_of = [](const ChainEvaluation& c) { return (c.sums.array() - 1.0).matrix().eval(); };
    for (int it = 0; it < 100; ++it) {
        const Eigen::VectorXd r = residual_of(e);
        if (r.cwiseAbs().maxCoeff() <= 1e-14) break;
        const double damping = 1e-10 * std::max(1.0, e.curvature.diagonal().maxCoeff());
        const Eigen::MatrixXd lhs = e.curvature + damping * Eigen::MatrixXd::Identity(hh, hh);
        const Eigen::VectorXd delta = lhs.ldlt().solve(r);
        const double d0 = r.dot(delta);
        if (!(d0 > 0.0)) break;

        auto at = [&](double t) { return evaluate_chain(y, w, kappa, multipliers + t * delta); };
        double lo = 0.0, d_lo = d0;
        double hi = 1.0;
        ChainEvaluation best = at(hi);
        double d_hi = residual_of(best).dot(delta);
        while (d_hi > 0.0 && hi < 1e30) {
            lo = hi;
            d_lo = d_hi;
            hi *= 4.0;
            best = at(hi);
            d_hi = residual_of(best).dot(delta);
        }
        double t_best = hi;
        double d_best = d_hi;
        // Illinois regula falsi on the decreasing, piecewise-linear directional derivative
        int side = 0;
        for (int k = 0; k < 60 && std::abs(d_best) > 1e-12 * d0; ++k) {
            double t = (lo * d_hi - hi * d_lo) / (d_hi - d_lo);
            if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
            if (t <= lo || t >= hi) break;
            ChainEvaluation c = at(t);
            const double d = residual_of(c).dot(delta);
            if (std::abs(d) < std::abs(d_best) || d_best > 0.0) {
                t_best = t;
                d_best = d;
                best = c;
            }
            if (d > 0.0) {
                lo = t;
                d_lo = d;
                if (side == 1) d_hi *= 0.5;
                side = 1;
            } else {
                hi = t;
                d_hi = d;
                if (side == -1) d_lo *= 0.5;
                side = -1;
            }
            if (hi - lo <= 1e-15 * hi) break;
        }
        multipliers += t_best * delta;
        e = std::move(best);
    }

    if ((e.sums.array() - 1.0).abs().maxCoeff() > 1e-9) {
        multipliers.resize(0);
        return chained_prox_by_dual(y, w, kappa);
    }
    for (std::size_t k = 0; k < horizon; ++k) e.x[k] /= e.sums(static_cast<Eigen::Index>(k));
    return e.x;
}

}  // namespace detail

TradePlan solve(const TradeProblem& problem, const SolverOptions& options,
                const std::optional<std::vector<Eigen::VectorXd>>& start) {
    if (!(options.tol > 0.0) || options.max_iter < 1) throw ConfigError("invalid solver options");
    const std::size_t horizon = problem.horizon();
    const Eigen::VectorXd& w = problem.current_weights();
    const auto m = w.size();

    std::vector<Eigen::VectorXd> x;
    if (start) {
        if (start->size() != horizon) throw DimensionError("start point does not match the horizon");
        for (const auto& s : *start) {
            if (s.size() != m) throw DimensionError("start point has the wrong dimension");
            x.push_back(project_to_simplex(s));
        }
    } else {
        x.assign(horizon, project_to_simplex(w));
    }

    // spread coefficient per slot (zero on cash); identical across periods by construction
    const auto& first = problem.periods().front();
    const auto n = static_cast<Eigen::Index>(first.costs.num_risky());
    Eigen::VectorXd spread = Eigen::VectorXd::Zero(m);
    spread.head(n).setConstant(problem.preferences().gamma_trade * first.costs.params().a);
    for (const auto& p : problem.periods()) {
        if (p.costs.params().a != first.costs.params().a) {
            throw ConfigError("spread coefficient must be the same in every period");
        }
    }

    TradePlan plan;
    double value = problem.objective(x);
    if (!std::isfinite(value)) throw NumericalError("non-finite objective at the starting point");
    plan.objective_trace.push_back(value);

    Eigen::VectorXd multipliers;
    double step = 1e8;
    for (int it = 1; it <= options.max_iter; ++it) {
        plan.iterations = it;
        const double smooth = problem.smooth_objective(x);
        const auto grad = problem.smooth_gradient(x);
        for (const auto& g : grad) {
            if (!g.allFinite()) throw NumericalError("non-finite objective gradient");
        }

        std::vector<Eigen::VectorXd> candidate;
        double residual = 0.0;
        bool accepted = false;
        while (step > 1e-18) {
            std::vector<Eigen::VectorXd> y(horizon);
            for (std::size_t tau = 0; tau < horizon; ++tau) y[tau] = x[tau] + step * grad[tau];
            candidate = horizon == 1 ? std::vector<Eigen::VectorXd>{detail::prox_single_period(y[0], w, step * spread)}
                                     : detail::prox_multi_period(y, w, step * spread, multipliers);
            double linear = 0.0;
            double dist2 = 0.0;
            residual = 0.0;
            for (std::size_t tau = 0; tau < horizon; ++tau) {
                const Eigen::VectorXd d = candidate[tau] - x[tau];
                linear += grad[tau].dot(d);
                dist2 += d.squaredNorm();
                residual = std::max(residual, d.cwiseAbs().maxCoeff());
            }
            const double bound = smooth + linear - dist2 / (2.0 * step);
            const double slack = 1e-15 * std::max(1.0, std::abs(smooth));
            if (problem.smooth_objective(candidate) >= bound - slack) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        const double movement = residual;
        residual /= step;

        const double candidate_value = problem.objective(candidate);
        if (!std::isfinite(candidate_value)) throw NumericalError("non-finite objective");
        if (candidate_value < value) {
            // no representable improvement left
            plan.converged = residual <= options.tol;
            break;
        }
        x = std::move(candidate);
        value = candidate_value;
        plan.objective_trace.push_back(value);
        if (residual <= options.tol && movement <= options.tol) {
            plan.converged = true;
            break;
        }
        step = std::min(step * 2.0, 1e8);
    }

    plan.objective_value = value;
    plan.holdings = x;
    plan.trades.resize(horizon);
    for (std::size_t tau = 0; tau < horizon; ++tau) plan.trades[tau] = x[tau] - (tau == 0 ? w : x[tau - 1]);
    return plan;
}

}  // namespace frontier
