#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shotnoise/error.hpp"
#include "shotnoise/greeks.hpp"
#include "shotnoise/montecarlo.hpp"
#include "shotnoise/option_pricer.hpp"
#include "shotnoise/shortrate.hpp"
#include "shotnoise/validation.hpp"

namespace py = pybind11;
using namespace shotnoise;

namespace {

QuadratureSpec quad_of(double rel_tol) {
  QuadratureSpec q;
  q.rel_tol = rel_tol;
  return q;
}

py::dict greeks_dict(const GreekSet& g, const NewGreekSet& n) {
  py::dict d;
  d["delta"] = g.delta;
  d["gamma"] = g.gamma;
  d["rho"] = g.rho;
  d["psi"] = g.psi;
  d["theta"] = g.theta;
  d["vega"] = g.vega ? py::cast(*g.vega) : py::none();
  d["delta_jump"] = g.delta_jump;
  d["kappa"] = n.kappa;
  d["mu"] = n.mu;
  d["epsilon"] = n.epsilon;
  d["extension"] = n.extension;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Option and bond pricing under shot-noise jump models";
  m.attr("__version__") = SHOTNOISE_VERSION;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<TruncationError>(m, "TruncationError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<KinkError>(m, "KinkError", base.ptr());

  py::class_<GaussianJumpLaw>(m, "JumpLaw")
      .def(py::init([](double nu, double delta) { return GaussianJumpLaw{nu, delta}; }),
           py::arg("nu") = 0.0, py::arg("delta") = 0.0)
      .def_readwrite("nu", &GaussianJumpLaw::nu)
      .def_readwrite("delta", &GaussianJumpLaw::delta)
      .def_property_readonly("varsigma", [](const GaussianJumpLaw& l) { return varsigma(l); });

  py::class_<OptionTerms>(m, "OptionTerms")
      .def(py::init([](double spot, double strike, double tau, double rate, double dividend,
                       const std::string& kind) {
             return OptionTerms{spot, strike, tau, rate, dividend, parse_option_kind(kind)};
           }),
           py::arg("spot") = 100.0, py::arg("strike") = 100.0, py::arg("tau") = 1.0,
           py::arg("rate") = 0.0, py::arg("dividend") = 0.0, py::arg("kind") = "call")
      .def_readwrite("spot", &OptionTerms::spot)
      .def_readwrite("strike", &OptionTerms::strike)
      .def_readwrite("tau", &OptionTerms::tau)
      .def_readwrite("rate", &OptionTerms::rate)
      .def_readwrite("dividend", &OptionTerms::dividend)
      .def_property(
          "kind", [](const OptionTerms& t) { return std::string(to_string(t.kind)); },
          [](OptionTerms& t, const std::string& k) { t.kind = parse_option_kind(k); });

  py::class_<AssetModel>(m, "AssetModel")
      .def(py::init([](double lam, double nu, double delta, double sigma) {
             return AssetModel{lam, {nu, delta}, sigma};
           }),
           py::arg("lam") = 0.0, py::arg("nu") = 0.0, py::arg("delta") = 0.0,
           py::arg("sigma") = 0.0)
      .def_readwrite("lam", &AssetModel::lambda)
      .def_readwrite("law", &AssetModel::law)
      .def_readwrite("sigma", &AssetModel::sigma);

  py::class_<RateModel>(m, "RateModel")
      .def(py::init([](double a, double b, double sigma_r, double lambda_r, double nu_r,
                       double delta_r) {
             return RateModel{a, b, sigma_r, lambda_r, {nu_r, delta_r}};
           }),
           py::arg("a") = 0.5, py::arg("b") = 0.0, py::arg("sigma_r") = 0.0,
           py::arg("lambda_r") = 0.0, py::arg("nu_r") = 0.0, py::arg("delta_r") = 0.0)
      .def_readwrite("a", &RateModel::a)
      .def_readwrite("b", &RateModel::b)
      .def_readwrite("sigma_r", &RateModel::sigma_r)
      .def_readwrite("lambda_r", &RateModel::lambda_r)
      .def_readwrite("law", &RateModel::law);

  m.def(
      "price",
      [](const OptionTerms& t, const AssetModel& model, const std::string& backend, double rel_tol) {
        return price(t, model, parse_backend(backend), quad_of(rel_tol)).value;
      },
      py::arg("terms"), py::arg("model"), py::arg("backend") = "series", py::arg("rel_tol") = 1e-10);
  m.def(
      "bs_price", [](const OptionTerms& t, double sigma) { return bs_price(t, sigma).value; },
      py::arg("terms"), py::arg("sigma"));
  m.def(
      "parity_residual",
      [](const OptionTerms& t, const AssetModel& model, const std::string& backend) {
        return parity_residual(t, model, parse_backend(backend));
      },
      py::arg("terms"), py::arg("model"), py::arg("backend") = "series");
  m.def(
      "l_parameter", [](const OptionTerms& t, const AssetModel& model) { return l_parameter(t, model); },
      py::arg("terms"), py::arg("model"));
  m.def(
      "greeks",
      [](const OptionTerms& t, const AssetModel& model, const std::string& backend, double rel_tol) {
        const Backend b = parse_backend(backend);
        return greeks_dict(common_greeks(t, model, b, quad_of(rel_tol)),
                           new_greeks(t, model, b, quad_of(rel_tol)));
      },
      py::arg("terms"), py::arg("model"), py::arg("backend") = "series", py::arg("rel_tol") = 1e-10);
  m.def(
      "identity_report",
      [](const OptionTerms& t, const AssetModel& model) {
        py::dict d;
        for (const auto& r : identity_report(t, model)) d[py::str(r.name)] = r.residual;
        return d;
      },
      py::arg("terms"), py::arg("model"));

  m.def(
      "bond_price",
      [](const RateModel& model, double t, double T, double r_t, const std::string& variant) {
        return bond_price(model, {t, T, r_t}, parse_rate_variant(variant));
      },
      py::arg("model"), py::arg("t"), py::arg("T"), py::arg("r_t"), py::arg("variant") = "general");
  m.def(
      "b_factor", [](const RateModel& model, double t, double T) { return b_factor(model, t, T); },
      py::arg("model"), py::arg("t"), py::arg("T"));
  m.def(
      "a_factor",
      [](const RateModel& model, double t, double T, const std::string& variant) {
        return a_variant(model, t, T, parse_rate_variant(variant));
      },
      py::arg("model"), py::arg("t"), py::arg("T"), py::arg("variant") = "general");
  m.def(
      "conditional_moments",
      [](const RateModel& model, double r_t, double horizon, const std::string& variant) {
        const RateMoments mo = conditional_moments(model, r_t, horizon, parse_rate_variant(variant));
        return py::make_tuple(mo.mean, mo.variance);
      },
      py::arg("model"), py::arg("r_t"), py::arg("horizon"), py::arg("variant") = "general");

  m.def(
      "mc_option_price",
      [](const OptionTerms& t, const AssetModel& model, std::uint64_t paths, std::uint64_t seed,
         bool antithetic) {
        const McEstimate e = mc_option_price(t, model, {paths, seed, antithetic});
        return py::make_tuple(e.mean, e.std_error);
      },
      py::arg("terms"), py::arg("model"), py::arg("paths") = 100000, py::arg("seed") = 20240601,
      py::arg("antithetic") = false);
  m.def(
      "mc_bond_price",
      [](const RateModel& model, double t, double T, double r_t, std::uint64_t paths,
         std::uint64_t seed) {
        const McEstimate e = mc_bond_price(model, {t, T, r_t}, {paths, seed});
        return py::make_tuple(e.mean, e.std_error);
      },
      py::arg("model"), py::arg("t"), py::arg("T"), py::arg("r_t"), py::arg("paths") = 100000,
      py::arg("seed") = 20240601);

  m.def("backend_agreement", []() {
    const ResidualReport r = backend_agreement();
    return py::make_tuple(r.max_residual, r.grid_points);
  });
}
