#include "gsp/coop_system.hpp"
#include "gsp/experiment.hpp"
#include "gsp/linear_solver.hpp"
#include "gsp/semilinear_solver.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace gsp;

namespace {

SemilinearOptions options(double damping, int max_iter, double tol_x, bool start_upper) {
    SemilinearOptions o;
    o.damping = damping;
    o.max_iter = max_iter;
    o.tol_x = tol_x;
    o.start = start_upper ? StartPoint::Upper : StartPoint::Lower;
    return o;
}

} // namespace

PYBIND11_MODULE(_gsp, m) {
    m.doc() = "groundstate positivity solvers";

    static py::exception<Error> gsp_error(m, "GspError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object inst = py::handle(gsp_error.ptr())(e.what());
            inst.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(gsp_error.ptr(), inst.ptr());
        }
    });

    py::class_<RadialPotential>(m, "Potential")
        .def_static("power", &RadialPotential::power, py::arg("c"), py::arg("s"), py::arg("r0") = 1.0)
        .def_static("exponential", &RadialPotential::exponential, py::arg("r0") = 0.0)
        .def_static("tabulated", &RadialPotential::tabulated, py::arg("r"), py::arg("q"), py::arg("r0"))
        .def_static("from_csv", &RadialPotential::from_csv, py::arg("path"), py::arg("r0"))
        .def("__call__", &RadialPotential::operator())
        .def_property_readonly("name", &RadialPotential::name)
        .def_property_readonly("r0", &RadialPotential::r0);

    py::class_<Grid>(m, "Grid")
        .def(py::init<int, double, std::size_t>(), py::arg("space_dim"), py::arg("r_max"), py::arg("n"))
        .def_property_readonly("space_dim", &Grid::space_dim)
        .def_property_readonly("r_max", &Grid::r_max)
        .def_property_readonly("h", &Grid::h)
        .def_property_readonly("size", &Grid::size)
        .def_property_readonly("radii", [](const Grid& g) { auto r = g.radii(); return std::vector<double>(r.begin(), r.end()); })
        .def_property_readonly("weights", [](const Grid& g) { auto w = g.weights(); return std::vector<double>(w.begin(), w.end()); })
        .def("inner", [](const Grid& g, const std::vector<double>& a, const std::vector<double>& b) { return g.inner(a, b); });

    m.def("build_grid", [](const RadialPotential& pot, int dim, double scale, double ppu) {
        return build_grid(pot, dim, scale, ppu);
    }, py::arg("potential"), py::arg("space_dim"), py::arg("spectral_scale"), py::arg("points_per_unit"));

    py::class_<DiscreteOperator>(m, "DiscreteOperator")
        .def_property_readonly("size", &DiscreteOperator::size)
        .def_property_readonly("sector", &DiscreteOperator::sector)
        .def("apply", [](const DiscreteOperator& op, const std::vector<double>& u) { return op.apply(u); });
    m.def("assemble", &assemble, py::arg("grid"), py::arg("potential"), py::arg("sector") = 0);

    py::class_<SpectrumSummary>(m, "Spectrum")
        .def_readonly("Lambda", &SpectrumSummary::Lambda)
        .def_readonly("phi", &SpectrumSummary::phi)
        .def_readonly("lambda2", &SpectrumSummary::lambda2)
        .def_readonly("lambda2_sector", &SpectrumSummary::lambda2_sector)
        .def_readonly("radial_eigs", &SpectrumSummary::radial_eigs)
        .def_readonly("radial_u", &SpectrumSummary::radial_u)
        .def_readonly("sector_minima", &SpectrumSummary::sector_minima);
    m.def("compute_spectrum", &compute_spectrum, py::arg("grid"), py::arg("potential"), py::arg("max_sector") = 8,
          py::arg("radial_count") = 3);

    py::class_<WindowEstimate>(m, "Window")
        .def_readonly("delta0", &WindowEstimate::delta0)
        .def_readonly("c0", &WindowEstimate::c0)
        .def_readonly("c0_floor", &WindowEstimate::c0_floor)
        .def_readonly("mu_samples", &WindowEstimate::mu_samples)
        .def_readonly("sample_norms", &WindowEstimate::sample_norms);
    m.def("estimate_window", &estimate_c0_delta0, py::arg("spectrum"), py::arg("op"), py::arg("margin") = 0.5);

    m.def("x_norm", [](const std::vector<double>& v, const std::vector<double>& phi) { return x_norm(v, phi); });

    py::class_<GroundstateVector>(m, "GroundstateVector")
        .def_readonly("values", &GroundstateVector::values)
        .def_readonly("x_norm", &GroundstateVector::x_norm)
        .def_readonly("c1", &GroundstateVector::c1);

    py::class_<LinearCertificate>(m, "LinearCertificate")
        .def_readonly("solution", &LinearCertificate::solution)
        .def_readonly("f1", &LinearCertificate::f1)
        .def_readonly("window", &LinearCertificate::window)
        .def_readonly("in_window", &LinearCertificate::in_window)
        .def_readonly("bound", &LinearCertificate::bound)
        .def_readonly("gsp", &LinearCertificate::gsp)
        .def_readonly("gsn", &LinearCertificate::gsn)
        .def_property_readonly("min_ratio", [](const LinearCertificate& c) { return c.ratio.min; })
        .def_property_readonly("max_ratio", [](const LinearCertificate& c) { return c.ratio.max; })
        .def_property_readonly("certified", &LinearCertificate::certified);
    m.def("certify_linear", [](const DiscreteOperator& op, const SpectrumSummary& s, const WindowEstimate& w, double mu,
                               const std::vector<double>& f) { return certify_theorem1({op, s, mu, f}, w); },
          py::arg("op"), py::arg("spectrum"), py::arg("window"), py::arg("mu"), py::arg("f"));

    py::class_<Nonlinearity>(m, "Nonlinearity")
        .def_static("constant", &Nonlinearity::constant)
        .def_static("rational", &Nonlinearity::rational, py::arg("kappa"), py::arg("K"))
        .def_static("exp_decay", &Nonlinearity::exp_decay, py::arg("kappa"), py::arg("K"), py::arg("s"))
        .def_property_readonly("name", &Nonlinearity::name)
        .def_property_readonly("kappa", &Nonlinearity::kappa)
        .def_property_readonly("K", &Nonlinearity::K);

    py::class_<SemilinearReport>(m, "SemilinearReport")
        .def_readonly("solution", &SemilinearReport::solution)
        .def_property_readonly("branch", [](const SemilinearReport& r) { return std::string(to_string(r.branch)); })
        .def_readonly("iterations", &SemilinearReport::iterations)
        .def_readonly("bracket_violations", &SemilinearReport::bracket_violations)
        .def_readonly("window", &SemilinearReport::window)
        .def_readonly("xnorm_bound", &SemilinearReport::xnorm_bound)
        .def_readonly("gsp", &SemilinearReport::gsp)
        .def_readonly("gsn", &SemilinearReport::gsn)
        .def_property_readonly("min_ratio", [](const SemilinearReport& r) { return r.ratio.min; })
        .def_property_readonly("max_ratio", [](const SemilinearReport& r) { return r.ratio.max; })
        .def_property_readonly("two_start_gap", [](const SemilinearReport& r) { return r.uniqueness.two_start_gap; })
        .def_property_readonly("certified", &SemilinearReport::certified);
    m.def("solve_semilinear",
          [](const DiscreteOperator& op, const SpectrumSummary& s, const WindowEstimate& w, const Nonlinearity& nl,
             double mu, double damping, int max_iter, double tol_x, bool start_upper) {
              return solve_semilinear({op, s, w, nl, mu}, options(damping, max_iter, tol_x, start_upper));
          },
          py::arg("op"), py::arg("spectrum"), py::arg("window"), py::arg("nonlinearity"), py::arg("mu"),
          py::arg("damping") = 0.5, py::arg("max_iter") = 500, py::arg("tol_x") = 1e-9, py::arg("start_upper") = false);

    py::class_<MonotoneReport>(m, "MonotoneReport")
        .def_readonly("minimal", &MonotoneReport::minimal)
        .def_readonly("maximal", &MonotoneReport::maximal)
        .def_readonly("gap", &MonotoneReport::gap)
        .def_readonly("shift", &MonotoneReport::shift);
    m.def("monotone_solve",
          [](const DiscreteOperator& op, const SpectrumSummary& s, const WindowEstimate& w, const Nonlinearity& nl,
             double mu, std::optional<double> shift) {
              MonotoneOptions o;
              o.shift = shift;
              return monotone_solve({op, s, w, nl, mu}, o);
          },
          py::arg("op"), py::arg("spectrum"), py::arg("window"), py::arg("nonlinearity"), py::arg("mu"),
          py::arg("shift") = py::none());

    py::class_<CoopMatrix>(m, "CoopMatrix")
        .def_readonly("xi1", &CoopMatrix::xi1)
        .def_readonly("xi2", &CoopMatrix::xi2)
        .def_readonly("Y", &CoopMatrix::Y)
        .def_readonly("P", &CoopMatrix::P)
        .def_readonly("P_inv", &CoopMatrix::P_inv);
    m.def("analyze_matrix", &analyze_matrix, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"));

    py::class_<SystemReport>(m, "SystemReport")
        .def_readonly("u1", &SystemReport::u1)
        .def_readonly("u2", &SystemReport::u2)
        .def_readonly("v1", &SystemReport::v1)
        .def_readonly("v2", &SystemReport::v2)
        .def_property_readonly("branch", [](const SystemReport& r) { return std::string(to_string(r.branch)); })
        .def_readonly("Lambda_star", &SystemReport::Lambda_star)
        .def_readonly("window", &SystemReport::window)
        .def_readonly("kappa_prime", &SystemReport::kappa_prime)
        .def_readonly("K_prime", &SystemReport::K_prime)
        .def_readonly("in_rectangle", &SystemReport::in_rectangle)
        .def_readonly("two_start_gap", &SystemReport::two_start_gap)
        .def_property_readonly("certified", &SystemReport::certified);
    m.def("solve_system",
          [](const DiscreteOperator& op, const SpectrumSummary& s, const WindowEstimate& w, const CoopMatrix& A,
             const Nonlinearity& nl1, const Nonlinearity& nl2, double mu, double damping, int max_iter, double tol_x) {
              return solve_system({op, s, w, A, nl1, nl2, mu}, options(damping, max_iter, tol_x, false));
          },
          py::arg("op"), py::arg("spectrum"), py::arg("window"), py::arg("matrix"), py::arg("nl1"), py::arg("nl2"),
          py::arg("mu"), py::arg("damping") = 0.5, py::arg("max_iter") = 500, py::arg("tol_x") = 1e-9);

    m.def("run",
          [](const std::filesystem::path& config, std::optional<double> grid_scale, std::optional<std::uint64_t> seed,
             std::optional<std::filesystem::path> out) {
              RunOverrides ov{grid_scale, seed, out};
              try {
                  return run_experiment(load_config(config), ov).exit_code;
              } catch (const Error& e) {
                  return exit_code_for(e.kind());
              }
          },
          py::arg("config"), py::arg("grid_scale") = py::none(), py::arg("seed") = py::none(), py::arg("out") = py::none());
    m.def("report", &write_report, py::arg("sweep_csv"), py::arg("out_dir"));
}
