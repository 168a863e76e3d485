#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "floquetlab/cantor.hpp"
#include "floquetlab/cli/commands.hpp"
#include "floquetlab/dynamics.hpp"
#include "floquetlab/error.hpp"
#include "floquetlab/kicked.hpp"
#include "floquetlab/numtheory.hpp"
#include "floquetlab/spectra.hpp"

namespace py = pybind11;
using namespace floquetlab;

namespace {

KickedSystemSpec system_from(const std::vector<double>& beta, std::size_t dim, double gamma, std::size_t rank,
                             double strength, double period, double hbar, const std::string& ordering,
                             int kick_sign) {
  auto spec = make_kicked_system(EigenvaluePolynomial(beta), dim, gamma, rank, strength, period, hbar);
  if (ordering == "kick_before_free") spec.ordering = KickOrdering::kick_before_free;
  else if (ordering != "kick_after_free") throw DomainError("ordering must be kick_after_free or kick_before_free");
  spec.kick_sign = kick_sign;
  spec.validate();
  return spec;
}

DoubleDouble dd(const std::string& beta) { return DoubleDouble::from(IrrationalSpec::parse(beta).value()); }

}  // namespace

PYBIND11_MODULE(_floquetlab, m) {
  m.doc() = "Floquet and kicked-system numerics";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ContractError>(m, "ContractError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ResourceGuardError>(m, "ResourceGuardError", base.ptr());

  m.def(
      "floquet_matrix",
      [](const std::vector<double>& beta, std::size_t dim, double gamma, std::size_t rank, double strength,
         double period, double hbar, const std::string& ordering, int kick_sign) {
        return ComplexMatrix(
            build_floquet(system_from(beta, dim, gamma, rank, strength, period, hbar, ordering, kick_sign)).matrix());
      },
      py::arg("beta"), py::arg("dim"), py::arg("gamma"), py::arg("rank") = 1, py::arg("strength") = 1.0,
      py::arg("period") = 1.0, py::arg("hbar") = 1.0, py::arg("ordering") = "kick_after_free",
      py::arg("kick_sign") = -1, "V for H0 eigenvalues hbar * sum beta_j n^j and rank-N kicks of decay gamma.");

  m.def(
      "eigenphases",
      [](const ComplexMatrix& v) {
        const auto d = eigenphases(UnitaryOperator(v));
        return py::make_tuple(d.phases, d.vectors);
      },
      py::arg("v"), "Ascending eigenphases in [0, 2pi) and eigenvector columns.");

  m.def(
      "eigenphase_sequence",
      [](const std::vector<double>& beta, std::size_t dim, double period, double hbar) {
        return eigenphase_sequence(h0_eigenvalues(EigenvaluePolynomial(beta), hbar, dim), period, hbar).theta;
      },
      py::arg("beta"), py::arg("dim"), py::arg("period") = 1.0, py::arg("hbar") = 1.0);

  m.def(
      "b_inverse",
      [](double x, double gamma, const std::vector<double>& beta, std::vector<std::size_t> ladder) {
        const std::size_t dim = ladder.back();
        const auto thetas = eigenphase_sequence(h0_eigenvalues(EigenvaluePolynomial(beta), 1.0, dim), 1.0, 1.0);
        return b_inverse_ladder(x, build_perturbation_vectors(gamma, dim, 1)[0], thetas, ladder);
      },
      py::arg("x"), py::arg("gamma"), py::arg("beta"), py::arg("ladder"));

  m.def("cotg_residual",
        [](double x, double gamma, const std::vector<double>& beta, std::size_t dim, double lambda) {
          const auto thetas = eigenphase_sequence(h0_eigenvalues(EigenvaluePolynomial(beta), 1.0, dim), 1.0, 1.0);
          return cotg_residual(x, build_perturbation_vectors(gamma, dim, 1)[0], thetas, lambda);
        },
        py::arg("x"), py::arg("gamma"), py::arg("beta"), py::arg("dim"), py::arg("lambda_over_hbar"));
  m.def("mirror_phase", &mirror_phase, py::arg("x"));

  m.def("sequence_mod1", [](unsigned j, const std::string& beta, std::size_t n) { return sequence_mod1(j, dd(beta), n); },
        py::arg("j"), py::arg("beta"), py::arg("count"), "({n^j beta})_{n=1..N}; beta as text, e.g. 'golden'.");
  m.def("discrepancy", [](const std::vector<double>& x) { return discrepancy_exact(x); }, py::arg("points"));
  m.def("erdos_turan_bound", [](const std::vector<double>& x, std::size_t m) { return erdos_turan_bound(x, m); },
        py::arg("points"), py::arg("m"));
  m.def(
      "weyl_sum",
      [](unsigned j, const std::string& beta, std::uint64_t h, std::size_t n) { return weyl_sum(j, dd(beta), h, n).sum; },
      py::arg("j"), py::arg("beta"), py::arg("h"), py::arg("count"));
  m.def(
      "continued_fraction",
      [](const std::string& beta, std::size_t depth) {
        const auto cf = continued_fraction(IrrationalSpec::parse(beta), depth);
        py::list q;
        for (const auto& a : cf.quotients) q.append(py::int_(py::str(a.str())));
        return py::make_tuple(q, cf.terminated);
      },
      py::arg("beta"), py::arg("depth") = 20, "Partial quotients and whether the expansion terminated.");
  m.def(
      "power_law_fit",
      [](const std::vector<double>& n, const std::vector<double>& v) {
        const auto f = exponent_fit(n, v);
        return py::make_tuple(f.slope, f.half_width);
      },
      py::arg("n"), py::arg("values"));

  m.def("cantor_value", &cantor_value, py::arg("x"), py::arg("depth") = kCantorDefaultDepth);
  m.def("in_cantor_set", &in_cantor_set, py::arg("x"), py::arg("depth") = kCantorDefaultDepth);
  m.def("removed_measure", &removed_measure, py::arg("depth"));

  m.def("phi_tilde", &phi_tilde, py::arg("omega"), py::arg("kappa"));
  m.def("delta_eps", &delta_eps, py::arg("t"), py::arg("epsilon"));
  m.def("delta_eps_integral", &delta_eps_integral, py::arg("epsilon"));
  m.def("delta_eps_cos_moment", &delta_eps_cos_moment, py::arg("epsilon"));

  m.def(
      "kicked_top",
      [](double c1, double c4, double period, double c3) {
        return ComplexMatrix(build_kicked_top_spin1(c1, c4, period, c3).matrix());
      },
      py::arg("c1"), py::arg("c4"), py::arg("period") = 1.0, py::arg("c3") = 0.0);

  m.def(
      "classify_energy",
      [](const std::vector<double>& energy, std::size_t dim) {
        DynamicsTrace t;
        t.dim = dim;
        t.energy = energy;
        const auto c = classify_growth(t);
        return py::dict(py::arg("label") = to_string(c.label), py::arg("slope") = c.slope,
                        py::arg("bounded") = c.bounded, py::arg("envelope_ratio") = c.envelope_ratio);
      },
      py::arg("energy"), py::arg("dim") = 0);

  m.def(
      "run",
      [](const std::string& subcommand, const std::map<std::string, std::string>& params, std::size_t threads,
         std::uint64_t seed, const std::string& format) {
        cli::RunConfig cfg;
        cfg.subcommand = subcommand;
        cfg.params = params;
        cfg.seed = seed;
        cfg.format = format;
        std::vector<cli::Artifact> out;
        {
          py::gil_scoped_release release;
          out = cli::run_command(cfg, threads);
        }
        py::dict files;
        for (const auto& a : out) files[py::str(a.filename)] = py::str(a.content);
        return files;
      },
      py::arg("subcommand"), py::arg("params") = std::map<std::string, std::string>{}, py::arg("threads") = 1,
      py::arg("seed") = 0, py::arg("format") = "csv", "Runs a CLI subcommand in-process; returns {filename: text}.");
  m.attr("subcommands") = cli::subcommands();
}
