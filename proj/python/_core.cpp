#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "edg/config.hpp"
#include "edg/equilibrium.hpp"
#include "edg/errors.hpp"
#include "edg/experiments.hpp"
#include "edg/finite_gibbs.hpp"
#include "edg/flux_contraction.hpp"
#include "edg/meanfield.hpp"
#include "edg/particle.hpp"
#include "edg/state_metrics.hpp"
#include "edg/variational_mf.hpp"

namespace py = pybind11;
using namespace edg;

namespace {

double ext(const ExtReal& x) { return x.to_double(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exchange-driven growth: mean-field ODE, particle system and finite Gibbs chain";

    py::register_exception<Error>(m, "EdgError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SupercriticalError>(m, "SupercriticalError", PyExc_ValueError);
    py::register_exception<SizeError>(m, "SizeError", PyExc_ValueError);
    py::register_exception<RangeError>(m, "RangeError", PyExc_ValueError);

    py::class_<KernelSpec>(m, "Kernel")
        .def_static("constant", &KernelSpec::constant, py::arg("value"), py::arg("m_max"))
        .def_static("product_power", &KernelSpec::product_power, py::arg("alpha"), py::arg("m_max"))
        .def_static("weight_driven_power", &KernelSpec::weight_driven_power, py::arg("gamma"), py::arg("m_max"))
        .def("__call__", &KernelSpec::operator(), py::arg("k"), py::arg("j"))
        .def_property_readonly("m_max", &KernelSpec::m_max);

    py::class_<Perturbation>(m, "Perturbation")
        .def_static("none", &Perturbation::none)
        .def_static("constant", &Perturbation::constant, py::arg("c"))
        .def_static("oscillating", &Perturbation::oscillating, py::arg("amplitude"), py::arg("frequency"))
        .def("__call__", &Perturbation::operator(), py::arg("t"), py::arg("k"), py::arg("l"));

    py::class_<WeightTable>(m, "WeightTable")
        .def_readonly("w", &WeightTable::w)
        .def_readonly("phi_c", &WeightTable::phi_c)
        .def_property_readonly("rho_c", [](const WeightTable& w) { return ext(w.rho_c); })
        .def_readonly("rho_c_tail_bound", &WeightTable::rho_c_tail_bound);
    m.def("weights", &weights, py::arg("kernel"));
    m.def("kernel_dbc_residual", &kernel_dbc_residual, py::arg("kernel"), py::arg("weights"));

    m.def(
        "equilibrium",
        [](const WeightTable& wt, double rho) {
            const auto e = equilibrium(wt, rho);
            return py::make_tuple(e.omega.p(), e.phi);
        },
        py::arg("weights"), py::arg("rho"), "Equilibrium distribution and fugacity at density rho.");

    m.def(
        "d_ex",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            return d_ex(ClusterDistribution(a), ClusterDistribution(b));
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "w1",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            return w1_oracle(ClusterDistribution(a), ClusterDistribution(b));
        },
        py::arg("a"), py::arg("b"));

    m.def(
        "integrate",
        [](const KernelSpec& K, const Perturbation& pert, const std::vector<double>& c0, double T,
           double tol, const std::vector<double>& stops) {
            const int M = static_cast<int>(c0.size()) - 1;
            EdgSystem sys{K, pert, M, ClusterDistribution(c0)};
            py::gil_scoped_release nogil;
            const auto tr = integrate(sys, T, tol, stops, false);
            return std::make_pair(tr.t, tr.c);
        },
        py::arg("kernel"), py::arg("perturbation"), py::arg("c0"), py::arg("T"), py::arg("tol") = 1e-11,
        py::arg("stops") = std::vector<double>{}, "Returns (times, states).");

    m.def(
        "edf_total",
        [](const KernelSpec& K, const Perturbation& pert, const std::vector<double>& c0, double T, double rho) {
            const int M = static_cast<int>(c0.size()) - 1;
            const auto wt = weights(K);
            EdgSystem sys{K, pert, M, ClusterDistribution(c0)};
            std::vector<double> ref = equilibrium_capped(wt, rho).omega.p();
            ref.resize(static_cast<std::size_t>(M) + 1, 0.0);
            std::vector<double> grid;
            for (int i = 1; i < 400; ++i) grid.push_back(T * i / 400);
            const auto tr = integrate(sys, T, 1e-12, grid, true);
            const auto r = edf_total(sys, wt, tr, ClusterDistribution(ref));
            return py::make_tuple(ext(r.total), r.quad_error);
        },
        py::arg("kernel"), py::arg("perturbation"), py::arg("c0"), py::arg("T"), py::arg("rho"),
        "EDF total along the ODE solution and its quadrature error estimate.");

    m.def(
        "simulate",
        [](const std::vector<long>& counts, const KernelSpec& K, const Perturbation& pert, double T,
           std::uint64_t seed, std::uint64_t stream) {
            const auto s0 = MicroState::from_counts(counts);
            py::gil_scoped_release nogil;
            return simulate(s0, K, pert, T, seed, stream).final_state.n;
        },
        py::arg("counts"), py::arg("kernel"), py::arg("perturbation"), py::arg("T"), py::arg("seed"),
        py::arg("stream") = 0, "Final occupation counts of one particle run.");

    m.def(
        "gibbs",
        [](int N, int L, const WeightTable& wt) {
            const auto sp = enumerate(N, L);
            const auto g = gibbs(sp, wt);
            return py::make_tuple(sp.states, g.pi);
        },
        py::arg("N"), py::arg("L"), py::arg("weights"), "Enumerated states and canonical Gibbs probabilities.");

    m.def(
        "r_net",
        [](const std::vector<double>& theta, const std::vector<double>& j_net) {
            return ext(r_net(NetFluxProblem{theta, j_net}));
        },
        py::arg("theta"), py::arg("j_net"));
    m.def(
        "optimal_oneway",
        [](const std::vector<double>& theta, const std::vector<double>& j_net) {
            const auto o = optimal_oneway(NetFluxProblem{theta, j_net});
            return std::make_pair(o.j, o.j_dagger);
        },
        py::arg("theta"), py::arg("j_net"));

    m.def(
        "run_command",
        [](const std::string& command, const std::string& config_text, const std::string& out_dir,
           std::uint64_t seed, int threads) {
            RunContext ctx;
            ctx.cfg = Config::parse(config_text);
            ctx.command = command;
            ctx.out_dir = out_dir;
            ctx.seed = seed;
            ctx.threads = threads;
            py::gil_scoped_release nogil;
            return run_command(ctx);
        },
        py::arg("command"), py::arg("config_text"), py::arg("out_dir"), py::arg("seed") = 1,
        py::arg("threads") = 1, "Same as the CLI subcommand; returns the exit code.");
}
