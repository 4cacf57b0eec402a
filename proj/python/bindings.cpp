#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>
#include <string>

#include "tvdd/decomposition.hpp"
#include "tvdd/errors.hpp"
#include "tvdd/experiment.hpp"
#include "tvdd/grid.hpp"
#include "tvdd/noise.hpp"
#include "tvdd/pgm.hpp"
#include "tvdd/solvers.hpp"
#include "tvdd/synthetic.hpp"

namespace py = pybind11;
using namespace tvdd;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Image to_image(const Array& a) {
  if (a.ndim() != 2) throw InvalidArgument("expected a 2-D array");
  const auto rows = static_cast<int>(a.shape(0));
  const auto cols = static_cast<int>(a.shape(1));
  return Image(rows, cols, std::vector<double>(a.data(), a.data() + a.size()));
}

Array from_span(std::span<const double> v, int rows, int cols) {
  Array out({rows, cols});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Array from_image(const Image& u) { return from_span(u.values(), u.rows(), u.cols()); }

DualField to_field(const Array& down, const Array& right) {
  const Image d = to_image(down);
  const Image r = to_image(right);
  if (!(d.size() == r.size())) throw InvalidArgument("down and right components differ in shape");
  return DualField(d.rows(), d.cols(), std::vector<double>(d.values().begin(), d.values().end()),
                   std::vector<double>(r.values().begin(), r.values().end()));
}

py::tuple from_field(const DualField& p) {
  return py::make_tuple(from_span(p.down_values(), p.rows(), p.cols()),
                        from_span(p.right_values(), p.rows(), p.cols()));
}

Method to_method(const std::string& name) {
  const auto m = parse_method(name);
  if (!m) throw InvalidArgument("unknown method '" + name + "'");
  return *m;
}

Shape to_shape(const std::string& name) {
  if (name == "window") return Shape::Window;
  if (name == "stripe") return Shape::Stripe;
  throw InvalidArgument("unknown shape '" + name + "'");
}

OuterStop to_stop(const std::string& name) {
  if (name == "gap") return OuterStop::RelativeGap;
  if (name == "change") return OuterStop::EnergyChange;
  if (name == "iterations") return OuterStop::IterationLimit;
  throw InvalidArgument("unknown stop rule '" + name + "' (gap, change, iterations)");
}

py::dict trace_dict(const SolverTrace& t) {
  const auto n = static_cast<py::ssize_t>(t.iterations.size());
  py::array_t<double> energy(n), gap(n), wall(n), momentum(n);
  py::array_t<long long> inner(n);
  for (py::ssize_t k = 0; k < n; ++k) {
    const IterationRecord& r = t.iterations[static_cast<std::size_t>(k)];
    energy.mutable_at(k) = r.energy;
    gap.mutable_at(k) = r.relative_gap;
    wall.mutable_at(k) = r.wall_ms;
    momentum.mutable_at(k) = r.momentum;
    inner.mutable_at(k) = r.inner_iterations;
  }
  py::dict d;
  d["method"] = std::string(method_name(t.method));
  d["initial_energy"] = t.initial_energy;
  d["energy"] = energy;
  d["relative_gap"] = gap;
  d["wall_ms"] = wall;
  d["inner_iterations"] = inner;
  d["momentum"] = momentum;
  d["converged"] = t.converged;
  d["iterations"] = t.size();
  return d;
}

py::dict solve_py(const Array& f, double alpha, const Decomposition& dec, const std::string& method,
                  const std::string& stop, double outer_tol, int max_outer, std::optional<double> oracle_energy,
                  double inner_tol, int inner_max, int threads) {
  const RofProblem problem(to_image(f), alpha);
  SolverConfig cfg;
  cfg.method = to_method(method);
  cfg.stop = to_stop(stop);
  cfg.outer_tol = outer_tol;
  cfg.max_outer = max_outer;
  cfg.oracle_energy = oracle_energy;
  cfg.inner = {inner_tol, inner_max};
  cfg.threads = threads;
  SolveResult r;
  {
    py::gil_scoped_release release;
    r = solve(problem, dec, cfg);
  }
  py::dict d = trace_dict(r.trace);
  d["p"] = from_field(r.p);
  d["u"] = from_image(recover_primal(r.p, problem));
  return d;
}

py::tuple reference_py(const Array& f, double alpha, int iterations, const std::string& cache_dir) {
  const RofProblem problem(to_image(f), alpha);
  Oracle o;
  {
    py::gil_scoped_release release;
    o = compute_oracle(problem, iterations, cache_dir);
  }
  return py::make_tuple(from_field(o.p), o.energy);
}

Array owner_map(const Decomposition& dec) {
  Array out({dec.grid().rows, dec.grid().cols});
  double* v = out.mutable_data();
  for (int i = 0; i < dec.grid().rows; ++i)
    for (int j = 0; j < dec.grid().cols; ++j) *v++ = dec.owner(i, j);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nonoverlapping domain decomposition solvers for dual total-variation denoising";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("gradient", [](const Array& u) { return from_field(gradient(to_image(u))); }, py::arg("u"));
  m.def("divergence", [](const Array& down, const Array& right) { return from_image(divergence(to_field(down, right))); },
        py::arg("down"), py::arg("right"));
  m.def("dual_energy",
        [](const Array& down, const Array& right, const Array& f, double alpha) {
          return dual_energy(to_field(down, right), RofProblem(to_image(f), alpha));
        },
        py::arg("down"), py::arg("right"), py::arg("f"), py::arg("alpha"));
  m.def("recover_primal",
        [](const Array& down, const Array& right, const Array& f, double alpha) {
          return from_image(recover_primal(to_field(down, right), RofProblem(to_image(f), alpha)));
        },
        py::arg("down"), py::arg("right"), py::arg("f"), py::arg("alpha"));
  m.def("psnr", [](const Array& u, const Array& ref) { return psnr(to_image(u), to_image(ref)); }, py::arg("u"),
        py::arg("reference"));

  py::class_<Decomposition>(m, "Decomposition")
      .def(py::init([](int rows, int cols, int block_rows, int block_cols, const std::string& shape) {
             return Decomposition({rows, cols}, block_rows, block_cols, to_shape(shape));
           }),
           py::arg("rows"), py::arg("cols"), py::arg("block_rows"), py::arg("block_cols"),
           py::arg("shape") = "window")
      .def_static(
          "stripes",
          [](int rows, int cols, int count, bool vertical) {
            return make_stripes({rows, cols}, count,
                                vertical ? StripeOrientation::Vertical : StripeOrientation::Horizontal);
          },
          py::arg("rows"), py::arg("cols"), py::arg("count"), py::arg("vertical") = false)
      .def_property_readonly("shape", [](const Decomposition& d) { return std::string(shape_name(d.shape())); })
      .def_property_readonly("grid", [](const Decomposition& d) { return py::make_tuple(d.grid().rows, d.grid().cols); })
      .def_property_readonly("blocks", [](const Decomposition& d) { return py::make_tuple(d.block_rows(), d.block_cols()); })
      .def_property_readonly("color_count", &Decomposition::color_count)
      .def_property_readonly("subdomain_count", &Decomposition::subdomain_count)
      .def_property_readonly("c1", [](const Decomposition& d) { return c1_constant(d); })
      .def_property_readonly("interface_length", [](const Decomposition& d) { return interface_length(d); })
      .def("owners", &owner_map)
      .def("colors", [](const Decomposition& d) {
        std::vector<int> c;
        for (const SubdomainView& s : d.subdomains()) c.push_back(s.color);
        return c;
      })
      .def("bregman_distance",
           [](const Decomposition& d, py::tuple p, py::tuple q) {
             return bregman_distance(to_field(p[0].cast<Array>(), p[1].cast<Array>()),
                                     to_field(q[0].cast<Array>(), q[1].cast<Array>()), d);
           },
           py::arg("p"), py::arg("q"));

  m.def("solve", &solve_py, py::arg("f"), py::arg("alpha"), py::arg("decomposition"), py::arg("method") = "fpj",
        py::arg("stop") = "gap", py::arg("outer_tol") = 1e-5, py::arg("max_outer") = 1000,
        py::arg("oracle_energy") = py::none(), py::arg("inner_tol") = 1e-4, py::arg("inner_max") = 50,
        py::arg("threads") = 1,
        "Run one outer solver. Returns a dict with the trace arrays, the dual field p = (down, right) and u.");
  m.def("reference_solution", &reference_py, py::arg("f"), py::arg("alpha"), py::arg("iterations") = 100000,
        py::arg("cache_dir") = "", "Full-grid FISTA reference. Returns ((down, right), energy).");

  m.def("add_gaussian_noise",
        [](const Array& u, double variance, std::uint64_t seed) {
          return from_image(add_gaussian_noise(to_image(u), variance, seed));
        },
        py::arg("u"), py::arg("variance"), py::arg("seed") = 0);
  m.def("synthetic_image", [](int rows, int cols) { return from_image(make_synthetic_image(rows, cols)); },
        py::arg("rows") = 512, py::arg("cols") = 512);
  m.def("read_pgm", [](const std::string& path) { return from_image(read_pgm(path)); }, py::arg("path"));
  m.def("write_pgm",
        [](const Array& u, const std::string& path, bool plain) {
          write_pgm(to_image(u), path, plain ? PgmEncoding::Plain : PgmEncoding::Raw);
        },
        py::arg("u"), py::arg("path"), py::arg("plain") = false);
}
