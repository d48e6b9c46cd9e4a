#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "frontier/agent.hpp"
#include "frontier/cli.hpp"
#include "frontier/costs.hpp"
#include "frontier/error.hpp"
#include "frontier/optimizer.hpp"
#include "frontier/risk_model.hpp"
#include "frontier/sweep.hpp"

namespace py = pybind11;
using namespace frontier;

namespace {

py::dict plan_trades(const std::vector<Eigen::VectorXd>& forecasts, const Eigen::VectorXd& weights,
                     const Eigen::MatrixXd& risky_covariance, const Eigen::VectorXd& sigma,
                     const Eigen::VectorXd& volume, double value, const InvestorPreferences& prefs,
                     const CostParams& params, std::size_t factors, double tol, int max_iter) {
    const auto n = static_cast<std::size_t>(risky_covariance.rows());
    const std::size_t k = factors == 0 ? n : factors;
    auto risk = std::make_shared<const FactorRiskModel>(with_cash_slot(fit_factor_model(risky_covariance, k)));
    PortfolioState state;
    state.weights = weights;
    state.trade = Eigen::VectorXd::Zero(weights.size());
    const CostInputs inputs{sigma, volume, value};
    const auto problem = build_mpo(forecasts, state, risk, inputs, params, prefs, {}, forecasts.size());
    const auto plan = solve(problem, SolverOptions{tol, max_iter});

    py::dict out;
    out["holdings"] = plan.holdings;
    out["trades"] = plan.trades;
    out["objective"] = plan.objective_value;
    out["iterations"] = plan.iterations;
    out["converged"] = plan.converged;
    return out;
}

py::tuple pareto(const std::vector<double>& risk, const std::vector<double>& ret) {
    if (risk.size() != ret.size()) throw DimensionError("risk and return lists differ in length");
    std::vector<FrontierPoint> points(risk.size());
    for (std::size_t i = 0; i < risk.size(); ++i) {
        points[i].excess_risk = risk[i];
        points[i].excess_return = ret[i];
    }
    std::vector<double> r, m;
    for (const auto& p : pareto_filter(points)) {
        r.push_back(p.excess_risk);
        m.push_back(p.excess_return);
    }
    return py::make_tuple(r, m);
}

}  // namespace

PYBIND11_MODULE(_frontier, m) {
    m.doc() = "Portfolio cost, risk, trade planning and frontier utilities";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<HistoryError>(m, "HistoryError", PyExc_IndexError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<CostParams>(m, "CostParams")
        .def(py::init([](double a, double b, double c) { return CostParams{a, b, c}; }), py::arg("a") = 0.0005,
             py::arg("b") = 1.0, py::arg("c") = 0.0)
        .def_readwrite("a", &CostParams::a)
        .def_readwrite("b", &CostParams::b)
        .def_readwrite("c", &CostParams::c)
        .def("__repr__", [](const CostParams& p) {
            std::ostringstream s;
            s << "CostParams(a=" << p.a << ", b=" << p.b << ", c=" << p.c << ")";
            return s.str();
        });

    py::class_<InvestorPreferences>(m, "InvestorPreferences")
        .def(py::init([](double risk, double trade) { return InvestorPreferences{risk, trade}; }),
             py::arg("gamma_risk") = 1.0, py::arg("gamma_trade") = 1.0)
        .def_readwrite("gamma_risk", &InvestorPreferences::gamma_risk)
        .def_readwrite("gamma_trade", &InvestorPreferences::gamma_trade);

    m.def(
        "transaction_cost",
        [](const Eigen::VectorXd& z, const Eigen::VectorXd& sigma, const Eigen::VectorXd& volume, double value,
           const CostParams& params) { return transaction_cost(z, sigma, volume, value, params); },
        py::arg("z"), py::arg("sigma"), py::arg("volume"), py::arg("value"), py::arg("params") = CostParams{});

    m.def(
        "realized_return",
        [](const Eigen::VectorXd& r, const Eigen::VectorXd& weights, const Eigen::VectorXd& trade, double cost) {
            return realized_return(r, PortfolioState{weights, 1.0, trade}, cost);
        },
        py::arg("r"), py::arg("weights"), py::arg("trade"), py::arg("cost"));

    m.def(
        "summarize",
        [](const std::vector<double>& returns, const std::vector<double>& risk_free) {
            const auto s = summarize(returns, risk_free);
            py::dict out;
            out["mean_return"] = s.mean_return;
            out["volatility"] = s.volatility;
            out["excess_return"] = s.excess_return;
            out["excess_risk"] = s.excess_risk;
            out["sharpe"] = s.sharpe ? py::cast(*s.sharpe) : py::none();
            return out;
        },
        py::arg("returns"), py::arg("risk_free"));

    m.def("discounted_returns", &discounted_returns, py::arg("rewards"), py::arg("gamma"));

    py::class_<FactorRiskModel>(m, "FactorRiskModel")
        .def_readonly("loadings", &FactorRiskModel::loadings)
        .def_readonly("factor_variances", &FactorRiskModel::factor_variances)
        .def_readonly("idiosyncratic", &FactorRiskModel::idiosyncratic)
        .def("covariance", &FactorRiskModel::covariance)
        .def("quadratic_risk", &quadratic_risk, py::arg("holdings"));

    m.def("fit_factor_model", &fit_factor_model, py::arg("cov"), py::arg("k"));
    m.def("with_cash_slot", &with_cash_slot, py::arg("model"));
    m.def("project_to_simplex", &project_to_simplex, py::arg("v"));

    m.def("plan_trades", &plan_trades, py::arg("forecasts"), py::arg("weights"), py::arg("risky_covariance"),
          py::arg("sigma"), py::arg("volume"), py::arg("value") = 1.0, py::arg("prefs") = InvestorPreferences{},
          py::arg("params") = CostParams{}, py::arg("factors") = 0, py::arg("tol") = 1e-7,
          py::arg("max_iter") = 10000,
          "Solve the trade program over len(forecasts) periods. Forecasts and weights carry cash last.");

    m.def("pareto_filter", &pareto, py::arg("risk"), py::arg("ret"),
          "Non-dominated (risk, return) pairs sorted by risk.");

    m.def(
        "small_grid",
        [] {
            const auto g = SweepGrid::small();
            return py::make_tuple(g.risk_values, g.trade_values);
        });
    m.def(
        "full_grid",
        [] {
            const auto g = SweepGrid::full();
            return py::make_tuple(g.risk_values, g.trade_values);
        });

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = run_cli(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command-line tool in process; returns (status, stdout, stderr).");
}
