#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "smoothtwin/classical.hpp"
#include "smoothtwin/dickman.hpp"
#include "smoothtwin/io.hpp"
#include "smoothtwin/lattice.hpp"
#include "smoothtwin/search.hpp"
#include "smoothtwin/sqisign.hpp"

namespace py = pybind11;
using namespace smoothtwin;

namespace {

BigInt to_big(const py::object& v) { return parse_bigint(py::str(v).cast<std::string>()); }

py::object to_py(const BigInt& v) { return py::module_::import("builtins").attr("int")(v.get_str()); }

py::list to_py(const std::vector<BigInt>& vs) {
  py::list out;
  for (const auto& v : vs) out.append(to_py(v));
  return out;
}

std::string twin_lines(const TwinSet& ts) { return twins_to_string(ts); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Smooth twin search with the prime number lattice";

  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
  py::register_exception<SearchFailed>(m, "SearchFailed", PyExc_RuntimeError);
  py::register_exception<PrecisionError>(m, "PrecisionError", PyExc_ArithmeticError);

  m.def("rho", &rho, py::arg("u"));
  m.def("estimate_optimal", [](std::uint64_t B, int m_) {
    const auto e = estimate_optimal(B, m_);
    return py::dict(py::arg("B") = e.bound, py::arg("m") = e.m, py::arg("u") = e.u, py::arg("log2_r") = e.log2_r);
  }, py::arg("B"), py::arg("m") = 2);
  m.def("asymptotic_estimate", &asymptotic_estimate, py::arg("B"), py::arg("m") = 2);
  m.def("geometric_mean_logprimes", &geometric_mean_logprimes, py::arg("x"));

  m.def("sieve_primes", [](std::uint64_t B) { return sieve_primes(B).primes; }, py::arg("B"));
  m.def("is_twin", [](const py::object& r, std::uint64_t B) {
    return std::holds_alternative<SmoothTwin>(verify_twin(to_big(r), B));
  }, py::arg("r"), py::arg("B"));

  m.def("brute_force_twins", [](std::uint64_t B, const py::object& bound) {
    return to_py(brute_force_twins(B, to_big(bound)).values());
  }, py::arg("B"), py::arg("bound"));
  m.def("stormer_enumerate", [](std::uint64_t B) { return to_py(stormer_enumerate(B).values()); }, py::arg("B"));
  m.def("chm_run", [](std::uint64_t B, int max_rounds) {
    const auto res = chm_run(B, max_rounds);
    return py::make_tuple(to_py(res.twins.values()), res.converged);
  }, py::arg("B"), py::arg("max_rounds") = 1000);
  m.def("pell_fundamental", [](const py::object& D) {
    const auto s = pell_fundamental(to_big(D));
    return py::make_tuple(to_py(s.x), to_py(s.y));
  }, py::arg("D"));

  m.def("gh_ratio_json", [](const py::object& r, std::uint64_t B, double alpha_log2) {
    const bool opt = std::isnan(alpha_log2);
    LatticeInstance inst{sieve_primes(B), opt ? 0.0 : alpha_log2, {}, 128};
    return report_to_json(gh_ratio(twin_rational(make_twin(to_big(r), B)), inst, opt)).dump();
  }, py::arg("r"), py::arg("B"), py::arg("alpha_log2") = std::nan(""));

  m.def("search_json", [](const std::string& config, int workers) {
    const SearchConfig cfg = config_from_json(Json::parse(config));
    TwinSet ts;
    {
      py::gil_scoped_release release;
      ts = run_search(cfg, workers);
    }
    return twin_lines(ts);
  }, py::arg("config"), py::arg("workers") = 1);

  m.def("enumerate_json", [](std::uint64_t B, int k_max, int kappa, std::uint64_t seed) {
    CompletenessReport rep;
    {
      py::gil_scoped_release release;
      rep = enumerate_toward_complete(B, k_max, kappa, seed);
    }
    return py::make_tuple(twin_lines(rep.found), rep.partial);
  }, py::arg("B"), py::arg("k_max"), py::arg("kappa"), py::arg("seed") = 0);

  m.def("boost_check_json", [](const py::object& r, std::uint64_t B) {
    return boost_to_json(boost_check(to_big(r), B)).dump();
  }, py::arg("r"), py::arg("B") = 2048);
}
