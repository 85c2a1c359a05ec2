#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "superad/fourier.hpp"
#include "superad/harness.hpp"

namespace py = pybind11;
using namespace superad;

namespace {

GridFunction from_numpy(const GridPtr& g, Space space, py::array_t<std::complex<double>> arr) {
    auto buf = arr.request();
    if (buf.ndim != 1 || buf.shape[0] != g->n)
        throw std::invalid_argument("array length must match grid.n");
    GridFunction f(g, space);
    auto* src = static_cast<std::complex<double>*>(buf.ptr);
    std::copy(src, src + g->n, f.v.begin());
    return f;
}

py::array_t<std::complex<double>> to_numpy(const GridFunction& f) {
    py::array_t<std::complex<double>> out(f.v.size());
    auto buf = out.request();
    std::copy(f.v.begin(), f.v.end(), static_cast<std::complex<double>*>(buf.ptr));
    return out;
}

}  // namespace

PYBIND11_MODULE(_superad, m) {
    m.doc() = "superadiabatic transition toolkit core";

    py::class_<PoleParams>(m, "PoleParams")
        .def_readonly("q_c", &PoleParams::q_c)
        .def_readonly("gamma", &PoleParams::gamma)
        .def_readonly("tau_c", &PoleParams::tau_c);

    m.def("derived_params", &derived_params, py::arg("c"), py::arg("alpha"), py::arg("delta"));

    py::class_<DiabaticModel>(m, "DiabaticModel")
        .def_static("sech_theta", &DiabaticModel::sech_theta, py::arg("c"), py::arg("alpha"),
                    py::arg("delta"))
        .def_property_readonly("delta", &DiabaticModel::delta)
        .def_property_readonly("poles", [](const DiabaticModel& mdl) { return mdl.poles(); })
        .def("theta", &DiabaticModel::theta)
        .def("theta_prime", &DiabaticModel::theta_prime, py::arg("q"), py::arg("k") = 0)
        .def("potential",
             [](const DiabaticModel& mdl, double q) {
                 Mat2 v = mdl.potential(q);
                 return std::vector<std::complex<double>>{v.a[0], v.a[1], v.a[2], v.a[3]};
             })
        .def("u0", [](const DiabaticModel& mdl, double q) {
            Mat2 u = mdl.frame(q).u0;
            return std::vector<std::complex<double>>{u.a[0], u.a[1], u.a[2], u.a[3]};
        });

    py::class_<Grid1D, std::shared_ptr<Grid1D>>(m, "Grid1D")
        .def_static("make",
                    [](double x_min, double x_max, int n, double epsilon) {
                        return std::const_pointer_cast<Grid1D>(
                            Grid1D::make(x_min, x_max, n, epsilon));
                    },
                    py::arg("x_min"), py::arg("x_max"), py::arg("n"), py::arg("epsilon"))
        .def_readonly("x_min", &Grid1D::x_min)
        .def_readonly("x_max", &Grid1D::x_max)
        .def_readonly("n", &Grid1D::n)
        .def_readonly("epsilon", &Grid1D::epsilon)
        .def("x", [](const Grid1D& g) {
            py::array_t<double> out(g.n);
            auto* p = static_cast<double*>(out.request().ptr);
            for (int j = 0; j < g.n; ++j) p[j] = g.x(j);
            return out;
        })
        .def("k", [](const Grid1D& g) {
            py::array_t<double> out(g.n);
            auto* p = static_cast<double*>(out.request().ptr);
            for (int j = 0; j < g.n; ++j) p[j] = g.k(j);
            return out;
        });

    m.def("scaled_fourier",
          [](const GridPtr& g, py::array_t<std::complex<double>> f) {
              return to_numpy(scaled_fourier(from_numpy(g, Space::Position, std::move(f))));
          },
          py::arg("grid"), py::arg("values"));
    m.def("inverse_scaled_fourier",
          [](const GridPtr& g, py::array_t<std::complex<double>> f) {
              return to_numpy(inverse_scaled_fourier(from_numpy(g, Space::Momentum, std::move(f))));
          },
          py::arg("grid"), py::arg("values"));

    m.def("v_of_k", [](double k, double delta) -> py::object {
        auto v = v_of_k(k, delta);
        return v ? py::cast(*v) : py::none();
    });

    py::class_<LandauZener>(m, "LandauZener")
        .def_readonly("exact", &LandauZener::exact)
        .def_readonly("large_p0", &LandauZener::large_p0)
        .def_readonly("ratio", &LandauZener::ratio);
    m.def("lz_probability", &lz_probability, py::arg("p0"), py::arg("model"), py::arg("epsilon"));

    py::class_<OptimalRepresentation>(m, "OptimalRepresentation")
        .def_readonly("eta_star", &OptimalRepresentation::eta_star)
        .def_readonly("k_star", &OptimalRepresentation::k_star)
        .def_readonly("n_star", &OptimalRepresentation::n_star)
        .def_readonly("newton_iterations", &OptimalRepresentation::newton_iterations);
    m.def("optimal_representation", &optimal_representation, py::arg("p0"), py::arg("sigma2"),
          py::arg("model"), py::arg("epsilon"));

    py::class_<PacketSpec> packet(m, "PacketSpec");
    py::enum_<PacketSpec::Shape>(packet, "Shape")
        .value("Gaussian", PacketSpec::Shape::Gaussian)
        .value("Sextic", PacketSpec::Shape::Sextic);
    packet.def(py::init([](const std::string& shape, double p0, double sigma2, double epsilon) {
                   PacketSpec s;
                   s.shape = shape == "sextic" ? PacketSpec::Shape::Sextic
                                               : PacketSpec::Shape::Gaussian;
                   s.p0 = p0;
                   s.sigma2 = sigma2;
                   s.epsilon = epsilon;
                   return s;
               }),
               py::arg("shape"), py::arg("p0"), py::arg("sigma2"), py::arg("epsilon"))
        .def_readwrite("p0", &PacketSpec::p0)
        .def_readwrite("sigma2", &PacketSpec::sigma2)
        .def_readwrite("epsilon", &PacketSpec::epsilon);

    m.def("packet_momentum", [](const PacketSpec& s, const GridPtr& g) {
        return to_numpy(packet_momentum(s, g));
    });

    py::class_<TransitionParams>(m, "TransitionParams")
        .def(py::init([](double epsilon, double delta, double q_c, double gamma, double t) {
                 TransitionParams p;
                 p.epsilon = epsilon;
                 p.delta = delta;
                 p.q_c = q_c;
                 p.gamma = gamma;
                 p.t_report = t;
                 return p;
             }),
             py::arg("epsilon"), py::arg("delta"), py::arg("q_c"), py::arg("gamma"),
             py::arg("t_report") = 0.0)
        .def_static("from_model", &TransitionParams::from_model, py::arg("model"),
                    py::arg("epsilon"), py::arg("t") = 0.0);

    m.def("formula_transmitted",
          [](const GridPtr& g, py::array_t<std::complex<double>> packet,
             const TransitionParams& par) {
              TransitionResult r =
                  formula_transmitted(from_numpy(g, Space::Momentum, std::move(packet)), par);
              py::dict out;
              out["psi_minus_hat"] = to_numpy(r.psi_minus_hat);
              out["l2_norm"] = r.l2_norm;
              out["peak_k"] = r.peak_k;
              out["warnings"] = r.warnings;
              return out;
          },
          py::arg("grid"), py::arg("packet_hat"), py::arg("params"));

    m.def("compare_point",
          [](const DiabaticModel& model, const GridPtr& g, const PacketSpec& spec,
             bool grid_refinement) {
              PointOptions opt;
              opt.grid_refinement_check = grid_refinement;
              ComparisonRecord r = compare_point(model, g, spec, opt);
              py::dict out;
              out["epsilon"] = r.epsilon;
              out["p0"] = r.p0;
              out["norm_formula"] = r.norm_formula;
              out["norm_numeric"] = r.norm_numeric;
              out["rel_l2_error"] = r.rel_l2_error;
              out["solver_self_error"] = r.solver_self_error;
              out["gate_passed"] = r.gate_passed;
              out["dt"] = r.dt;
              out["t0"] = r.t0;
              return out;
          },
          py::arg("model"), py::arg("grid"), py::arg("packet"),
          py::arg("grid_refinement") = false);

    m.def("coefficient_table",
          [](const DiabaticModel& model, const GridPtr& g, int n_max) {
              CoefficientTable t = coefficient_tables(model, g, n_max);
              py::dict out;
              for (int n = 0; n <= n_max; ++n)
                  for (int m2 = 0; m2 <= n; ++m2) {
                      py::tuple key = py::make_tuple(n, m2);
                      py::dict entry;
                      entry["x"] = to_numpy(t.x(n, m2));
                      entry["y"] = to_numpy(t.y(n, m2));
                      entry["z"] = to_numpy(t.z(n, m2));
                      entry["w"] = to_numpy(t.w(n, m2));
                      out[key] = entry;
                  }
              return out;
          },
          py::arg("model"), py::arg("grid"), py::arg("n_max"));

    m.def("run_verify_quick", [] {
        VerifyOptions opt;
        opt.quick = true;
        VerifyReport rep = run_verify(opt);
        py::list suites;
        for (const auto& s : rep.suites) {
            py::dict d;
            d["name"] = s.name;
            d["passed"] = s.passed;
            d["wall_time_s"] = s.wall_time_s;
            d["details"] = s.details;
            suites.append(d);
        }
        py::dict out;
        out["all_passed"] = rep.all_passed();
        out["suites"] = suites;
        return out;
    });
}
