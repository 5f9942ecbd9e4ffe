#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vrtpp/arc_solver.hpp"
#include "vrtpp/harness.hpp"
#include "vrtpp/path_solver.hpp"

namespace py = pybind11;
using namespace vrtpp;

PYBIND11_MODULE(_vrtpp, m) {
  m.doc() = "vehicle routing and trajectory solver with profits and partial refueling";

  py::class_<OrbitalElements>(m, "OrbitalElements")
      .def(py::init<>())
      .def_readwrite("a", &OrbitalElements::a)
      .def_readwrite("e", &OrbitalElements::e)
      .def_readwrite("i", &OrbitalElements::i)
      .def_readwrite("raan", &OrbitalElements::raan)
      .def_readwrite("argp", &OrbitalElements::argp)
      .def_readwrite("M0", &OrbitalElements::M0);

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("isp_s", &Scenario::isp_s)
      .def_readwrite("m_dry", &Scenario::m_dry)
      .def_readwrite("m_max", &Scenario::m_max)
      .def_readwrite("q_max", &Scenario::q_max)
      .def_readwrite("r_max", &Scenario::r_max)
      .def_readwrite("t_svc_tu", &Scenario::t_svc_tu)
      .def_readwrite("lambda_", &Scenario::lambda)
      .def_readwrite("t_max_tu", &Scenario::t_max_tu)
      .def_readwrite("l_max", &Scenario::l_max)
      .def_readwrite("milp_time_limit_s", &Scenario::milp_time_limit_s)
      .def_readwrite("profit", &Scenario::profit)
      .def_readwrite("payload_kg", &Scenario::payload_kg)
      .def("total_profit", &Scenario::total_profit)
      .def("n_total", [](const Scenario& s) { return s.sets.n_total(); })
      .def("validate", &Scenario::validate)
      .def("to_json", &scenario_to_json_text);

  py::class_<MissionLeg>(m, "MissionLeg")
      .def_readonly("frm", &MissionLeg::from)
      .def_readonly("to", &MissionLeg::to)
      .def_readonly("t_dep", &MissionLeg::t_dep)
      .def_readonly("t_tr", &MissionLeg::t_tr)
      .def_readonly("dv_kms", &MissionLeg::dv_kms)
      .def_readonly("m0_kg", &MissionLeg::m0_kg)
      .def_readonly("mf_kg", &MissionLeg::mf_kg);

  py::class_<VehicleRoute>(m, "VehicleRoute")
      .def_readonly("vehicle", &VehicleRoute::vehicle)
      .def_readonly("sequence", &VehicleRoute::sequence)
      .def_readonly("legs", &VehicleRoute::legs)
      .def_readonly("refuels", &VehicleRoute::refuels)
      .def_readonly("profit", &VehicleRoute::profit);

  py::class_<MissionSolution>(m, "MissionSolution")
      .def_readonly("method", &MissionSolution::method)
      .def_readonly("feasible", &MissionSolution::feasible)
      .def_readonly("converged", &MissionSolution::converged)
      .def_readonly("iterations", &MissionSolution::iterations)
      .def_readonly("wall_time_s", &MissionSolution::wall_time_s)
      .def_readonly("routes", &MissionSolution::routes)
      .def_readonly("profit", &MissionSolution::profit)
      .def_readonly("initial_propellant_kg", &MissionSolution::initial_propellant_kg)
      .def_readonly("refuel_kg", &MissionSolution::refuel_kg)
      .def_readonly("objective", &MissionSolution::objective)
      .def_readonly("targets_visited", &MissionSolution::targets_visited)
      .def_readonly("vehicles_used", &MissionSolution::vehicles_used)
      .def("to_json", &mission_to_json)
      .def("to_csv", &mission_to_csv)
      .def("to_text", &mission_to_text);

  m.def("case_study_scenario", &case_study_scenario);
  m.def("generate_instance", &generate_instance, py::arg("seed"), py::arg("n_r"), py::arg("n_t"));
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("scenario_from_json", &scenario_from_json_text, py::arg("text"));
  m.def("save_scenario", &save_scenario, py::arg("scenario"), py::arg("path"));

  m.def(
      "solve_arc", [](const Scenario& s) { return solve_arc(s); }, py::arg("scenario"),
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "solve_path", [](const Scenario& s) { return solve_path(s); }, py::arg("scenario"),
      py::call_guard<py::gil_scoped_release>());

  m.def("gap_to_ideal", &gap_to_ideal, py::arg("objective"), py::arg("profits"));

  m.def(
      "transfer_dv",
      [](const OrbitalElements& a, const OrbitalElements& b, double t_dep, double t_tr) {
        Scenario scn = case_study_scenario();
        auto dv = transfer_dv(a, b, t_dep, t_tr, scn.units);
        return dv ? py::cast(*dv) : py::cast(py::none());
      },
      py::arg("el_i"), py::arg("el_j"), py::arg("t_dep_tu"), py::arg("t_tr_tu"));

  m.def(
      "dv_grid_csv",
      [](const OrbitalElements& a, const OrbitalElements& b, double dep_lo, double dep_hi,
         double tof_lo, double tof_hi, int n_dep, int n_tof) {
        Scenario scn = case_study_scenario();
        return dv_grid_csv(dv_grid(a, b, dep_lo, dep_hi, tof_lo, tof_hi, n_dep, n_tof, scn.units));
      },
      py::arg("el_i"), py::arg("el_j"), py::arg("dep_lo"), py::arg("dep_hi"), py::arg("tof_lo"),
      py::arg("tof_hi"), py::arg("n_dep") = 50, py::arg("n_tof") = 50);
}
