#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "introlab/experiments.hpp"

namespace py = pybind11;
using namespace introlab;

namespace {

py::object json_to_py(const json& j) {
  py::module_ pyjson = py::module_::import("json");
  return pyjson.attr("loads")(j.dump());
}

json py_to_json(const py::object& o) {
  py::module_ pyjson = py::module_::import("json");
  std::string s = py::cast<std::string>(pyjson.attr("dumps")(o));
  return json::parse(s);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "introlab: finite fields, low-degree codes, nonlocal games, and the "
            "introspective protocol stack";

  struct PyField {
    GfPtr f;
  };
  py::class_<PyField>(m, "Gf")
      .def_static("make", [](uint32_t p, uint32_t t) { return PyField{Gf::make(p, t)}; })
      .def_static("make_with_modulus",
                  [](uint32_t p, uint32_t t, const std::vector<uint32_t>& mod) {
                    return PyField{Gf::make(p, t, mod)};
                  })
      .def_property_readonly("p", [](const PyField& f) { return f.f->p(); })
      .def_property_readonly("t", [](const PyField& f) { return f.f->t(); })
      .def_property_readonly("q", [](const PyField& f) { return f.f->q(); })
      .def("add", [](const PyField& f, uint32_t a, uint32_t b) { return f.f->add(a, b); })
      .def("sub", [](const PyField& f, uint32_t a, uint32_t b) { return f.f->sub(a, b); })
      .def("mul", [](const PyField& f, uint32_t a, uint32_t b) { return f.f->mul(a, b); })
      .def("inv", [](const PyField& f, uint32_t a) { return f.f->inv(a); })
      .def("neg", [](const PyField& f, uint32_t a) { return f.f->neg(a); })
      .def("pow", [](const PyField& f, uint32_t a, uint64_t e) { return f.f->pow(a, e); })
      .def("trace", [](const PyField& f, uint32_t a) { return f.f->trace(a); })
      .def("self_dual_basis", [](const PyField& f) { return f.f->self_dual_basis(); })
      .def("character_sum",
           [](const PyField& f, uint32_t a) {
             auto c = f.f->character_sum(a);
             return std::make_pair(c.real(), c.imag());
           })
      .def("elem_hex", [](const PyField& f, uint32_t a) { return f.f->elem_hex(a); })
      .def("elem_from_hex",
           [](const PyField& f, const std::string& s) { return f.f->elem_from_hex(s); })
      .def("name", [](const PyField& f) { return f.f->name(); });

  py::class_<MultiPoly>(m, "MultiPoly")
      .def_static("constant",
                  [](const PyField& f, uint32_t arity, uint32_t c) {
                    return MultiPoly::constant(f.f, arity, c);
                  })
      .def_static("variable", [](const PyField& f, uint32_t arity, uint32_t i) {
        return MultiPoly::variable(f.f, arity, i);
      })
      .def("eval", [](const MultiPoly& p, const std::vector<uint32_t>& x) { return p.eval(x); })
      .def("total_degree", &MultiPoly::total_degree)
      .def("term_count", &MultiPoly::term_count)
      .def("is_zero", &MultiPoly::is_zero)
      .def("__add__", [](const MultiPoly& a, const MultiPoly& b) { return a + b; })
      .def("__sub__", [](const MultiPoly& a, const MultiPoly& b) { return a - b; })
      .def("__mul__", [](const MultiPoly& a, const MultiPoly& b) { return a * b; })
      .def("__eq__", [](const MultiPoly& a, const MultiPoly& b) { return a == b; })
      .def("__str__", &MultiPoly::str);

  m.def("ld_encode",
        [](const PyField& f, uint64_t n, uint32_t t1, uint32_t m_,
           const std::vector<uint32_t>& values) {
          return ld_encode(LdParams{f.f, n, t1, m_}, values);
        },
        py::arg("field"), py::arg("n"), py::arg("t1"), py::arg("m"), py::arg("values"));
  m.def("pi_index", [](const PyField& f, uint64_t n, uint32_t t1, uint32_t m_, uint64_t i) {
    CanonicalMaps maps(LdParams{f.f, n, t1, m_});
    return maps.pi_index(i);
  });
  m.def("subcube_decompose_remainder_zero",
        [](const MultiPoly& p, const std::vector<std::vector<uint32_t>>& cube) {
          return subcube_decompose(p, cube).ok;
        });

  m.def("parse_instance_text", [](const std::string& text) {
    auto inst = SuccinctSatInstance::from_circuit(parse_circuit(text));
    return py::make_tuple(inst.n, inst.circuit.size());
  });
  m.def("brute_force_sat", [](const std::string& text) -> py::object {
    auto inst = SuccinctSatInstance::from_circuit(parse_circuit(text));
    auto a = inst.brute_force();
    if (!a) return py::none();
    return py::cast(*a);
  });

  m.def("game_value", [](const std::string& game, const std::string& strategy) {
    GfPtr f2 = Gf::make(2, 1);
    RegisterParams lam1{1, {2}, {f2}};
    RegisterParams lam2{2, {2, 2}, {f2, f2}};
    bool cheat = strategy.rfind("cheat", 0) == 0;
    if (game == "hide") {
      auto pack = data_hiding_game(lam1, "ask");
      return exact_value(pack.game,
                         cheat ? data_hiding_zread_cheater(lam1, "ask") : *pack.honest);
    }
    if (game == "intro-cross") {
      auto pack = intro_cross_check(lam2, 2);
      return exact_value(pack.game, *pack.honest);
    }
    if (game == "intro-surf") {
      auto pack = intro_surface_sampler(lam2, 2);
      return exact_value(pack.game, cheat ? lying_surface_cheater(lam2, 2) : *pack.honest);
    }
    if (game == "basis") {
      PauliBasisConfig cfg{f2, 2, 0.25, true};
      auto pack = pauli_basis_game(cfg);
      return exact_value(pack.game, cheat ? pauli_basis_wrong_basis_cheater(cfg) : *pack.honest);
    }
    if (game == "compiled-toy") {
      auto stack = compile_full_toy_stack();
      return exact_value(stack.game, stack.honest);
    }
    throw std::invalid_argument("unknown game: " + game);
  }, py::arg("game"), py::arg("strategy") = "honest");

  m.def("run_experiment",
        [](const std::string& name, const py::object& params, uint64_t seed) {
          auto r = run_experiment(name, py_to_json(params), seed);
          return py::make_tuple(r.pass, json_to_py(r.report));
        },
        py::arg("name"), py::arg("params") = py::dict(), py::arg("seed") = 1);
  m.def("experiment_names", [] {
    std::vector<std::string> names;
    for (const auto& [k, v] : experiment_registry()) names.push_back(k);
    return names;
  });
  m.def("run_suite", [](uint64_t seed) { return json_to_py(run_suite(seed)); },
        py::arg("seed") = 1);

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "0.1.0";
#endif
}
