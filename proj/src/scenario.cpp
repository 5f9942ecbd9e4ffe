#include "vrtpp/scenario.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace vrtpp {

using nlohmann::json;

NodeSets build_index_sets(int n_dv, int n_rv, int n_r, int n_t) {
  if (n_dv < 1 || n_rv < 1 || n_r < 0 || n_t < 1)
    throw std::invalid_argument("build_index_sets: counts out of range");
  NodeSets s;
  s.n_dv = n_dv;
  s.n_rv = n_rv;
  s.n_r = n_r;
  s.n_t = n_t;
  return s;
}

std::vector<int> satellites_of(RouteId omega, const NodeSets& sets) {
  std::vector<int> out;
  for (int j = 0; j < sets.n_t; ++j)
    if (omega.omega >> j & 1u) out.push_back(sets.target_begin() + j);
  return out;
}

RouteId omega_of(const std::vector<int>& targets, const NodeSets& sets) {
  if (targets.empty()) throw std::invalid_argument("omega_of: empty target set");
  RouteId id;
  for (int t : targets) {
    if (!sets.is_target(t)) throw std::invalid_argument("omega_of: index is not a target");
    id.omega |= std::uint64_t{1} << sets.target_offset(t);
  }
  return id;
}

const OrbitalElements& Scenario::elements_of(int node) const {
  if (sets.is_start_depot(node) || sets.is_end_depot(node)) return depot;
  if (sets.is_station(node)) return stations[sets.orig_station_of(node) - sets.station_begin()];
  if (sets.is_target(node)) return targets[sets.target_offset(node)];
  throw std::out_of_range("elements_of: bad node index");
}

double Scenario::total_profit() const {
  double p = 0;
  for (double v : profit) p += v;
  return p;
}

void Scenario::validate() const {
  if (static_cast<int>(targets.size()) != sets.n_t || static_cast<int>(stations.size()) != sets.n_r)
    throw SchemaError("node counts inconsistent with index sets");
  if (payload_kg.size() != targets.size() || profit.size() != targets.size())
    throw SchemaError("targets: payload/profit size mismatch");
  if (m_dry <= 0 || m_max <= 0 || q_max <= 0 || r_max <= 0) throw SchemaError("masses must be positive");
  if (m_dry > m_max) throw SchemaError("m_dry_kg exceeds m_max_kg");
  if (lambda <= 0) throw SchemaError("lambda must be positive");
  if (t_max_tu <= 0) throw SchemaError("t_max_tu must be positive");
  for (double s : payload_kg)
    if (s > q_max) throw SchemaError("payload_kg exceeds q_max_kg");
  auto check_el = [](const OrbitalElements& el, const char* who) {
    if (!el.valid()) throw SchemaError(std::string(who) + ": invalid orbital elements");
  };
  check_el(depot, "depot");
  for (const auto& el : stations) check_el(el, "station");
  for (const auto& el : targets) check_el(el, "target");
}

namespace {

constexpr double kDegToRad = M_PI / 180.0;

json node_to_json(const OrbitalElements& el, const CanonicalUnits& u) {
  return json{{"a_km", el.a * u.du},
              {"e", el.e},
              {"i_deg", el.i / kDegToRad},
              {"raan_deg", el.raan / kDegToRad},
              {"argp_deg", el.argp / kDegToRad},
              {"M_deg", el.M0 / kDegToRad}};
}

OrbitalElements node_from_json(const json& j, const CanonicalUnits& u, const std::string& where) {
  for (const char* key : {"a_km", "e", "i_deg", "raan_deg", "argp_deg", "M_deg"})
    if (!j.contains(key)) throw SchemaError(where + ": missing field " + key);
  OrbitalElements el;
  el.a = j.at("a_km").get<double>() / u.du;
  el.e = j.at("e").get<double>();
  el.i = j.at("i_deg").get<double>() * kDegToRad;
  el.raan = j.at("raan_deg").get<double>() * kDegToRad;
  el.argp = j.at("argp_deg").get<double>() * kDegToRad;
  el.M0 = j.at("M_deg").get<double>() * kDegToRad;
  auto wrap = [](double& x) {
    x = std::fmod(x, 2.0 * M_PI);
    if (x < 0) x += 2.0 * M_PI;
  };
  wrap(el.raan);
  wrap(el.argp);
  wrap(el.M0);
  return el;
}

}  // namespace

std::string scenario_to_json_text(const Scenario& s) {
  json j;
  j["units"] = {{"mu_e_km3_s2", s.units.mu_e}, {"du_km", s.units.du}, {"g0_ms2", s.units.g0}};
  j["parameters"] = {{"n_dv", s.sets.n_dv},
                     {"n_rv", s.sets.n_rv},
                     {"isp_s", s.isp_s},
                     {"m_dry_kg", s.m_dry},
                     {"m_max_kg", s.m_max},
                     {"q_max_kg", s.q_max},
                     {"r_max_kg", s.r_max},
                     {"t_svc_tu", s.t_svc_tu},
                     {"lambda_per_kg", s.lambda},
                     {"t_max_tu", s.t_max_tu},
                     {"l_max", s.l_max},
                     {"eps_c_kms", s.eps_c_kms},
                     {"milp_time_limit_s", s.milp_time_limit_s}};
  j["depot"] = node_to_json(s.depot, s.units);
  j["stations"] = json::array();
  for (const auto& st : s.stations) j["stations"].push_back(node_to_json(st, s.units));
  j["targets"] = json::array();
  for (size_t i = 0; i < s.targets.size(); ++i) {
    json t = node_to_json(s.targets[i], s.units);
    t["payload_kg"] = s.payload_kg[i];
    t["profit"] = s.profit[i];
    j["targets"].push_back(t);
  }
  return j.dump(2) + "\n";
}

Scenario scenario_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  Scenario s;
  if (j.contains("units")) {
    const json& u = j["units"];
    if (u.contains("mu_e_km3_s2")) s.units.mu_e = u["mu_e_km3_s2"].get<double>();
    if (u.contains("du_km")) s.units.du = u["du_km"].get<double>();
    if (u.contains("g0_ms2")) s.units.g0 = u["g0_ms2"].get<double>();
  }
  if (!j.contains("parameters")) throw SchemaError("parameters: missing");
  const json& p = j["parameters"];
  if (!p.contains("t_max_tu")) throw SchemaError("parameters.t_max_tu: required field missing");
  auto get = [&](const char* key, double dflt) {
    return p.contains(key) ? p[key].get<double>() : dflt;
  };
  int n_dv = p.contains("n_dv") ? p["n_dv"].get<int>() : 3;
  int n_rv = p.contains("n_rv") ? p["n_rv"].get<int>() : 3;
  s.isp_s = get("isp_s", 320.0);
  s.m_dry = get("m_dry_kg", 500.0);
  s.m_max = get("m_max_kg", 2000.0);
  s.q_max = get("q_max_kg", 200.0);
  s.r_max = get("r_max_kg", 1000.0);
  s.t_max_tu = p["t_max_tu"].get<double>();
  s.lambda = get("lambda_per_kg", 0.0005);
  s.l_max = static_cast<int>(get("l_max", 20));
  s.eps_c_kms = get("eps_c_kms", 0.01);
  s.milp_time_limit_s = get("milp_time_limit_s", 100.0);
  if (p.contains("t_svc_tu"))
    s.t_svc_tu = p["t_svc_tu"].get<double>();
  else if (p.contains("t_svc_days"))
    s.t_svc_tu = p["t_svc_days"].get<double>() * 24.0 / s.units.tu_hours();
  else
    s.t_svc_tu = 2.0 * 24.0 / s.units.tu_hours();

  if (!j.contains("depot")) throw SchemaError("depot: missing");
  s.depot = node_from_json(j["depot"], s.units, "depot");
  if (j.contains("stations"))
    for (const auto& st : j["stations"]) s.stations.push_back(node_from_json(st, s.units, "stations[]"));
  if (!j.contains("targets") || j["targets"].empty()) throw SchemaError("targets: missing or empty");
  for (const auto& t : j["targets"]) {
    s.targets.push_back(node_from_json(t, s.units, "targets[]"));
    if (!t.contains("payload_kg")) throw SchemaError("targets[].payload_kg: missing");
    if (!t.contains("profit")) throw SchemaError("targets[].profit: missing");
    s.payload_kg.push_back(t["payload_kg"].get<double>());
    s.profit.push_back(t["profit"].get<double>());
  }
  s.sets = build_index_sets(n_dv, n_rv, static_cast<int>(s.stations.size()),
                            static_cast<int>(s.targets.size()));
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json_text(ss.str());
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file: " + path);
  out << scenario_to_json_text(s);
}

Scenario case_study_scenario() {
  Scenario s;
  s.sets = build_index_sets(3, 3, 2, 5);
  auto el = [&](double e, double i_deg, double raan_deg, double argp_deg, double m_deg) {
    OrbitalElements o;
    o.a = 1.0;
    o.e = e;
    o.i = i_deg * kDegToRad;
    o.raan = raan_deg * kDegToRad;
    o.argp = argp_deg * kDegToRad;
    o.M0 = m_deg * kDegToRad;
    return o;
  };
  s.depot = el(0.00, 10.00, 0.0, 0.0, 0.0);
  s.stations = {el(0.00, 5.00, 0.0, 0.0, 90.0), el(0.00, 5.00, 0.0, 0.0, 270.0)};
  s.targets = {el(0.00, 3.54, 298.86, 0.0, 316.51), el(0.01, 1.67, 170.97, 0.0, 100.23),
               el(0.01, 3.24, 248.49, 0.0, 262.02), el(0.00, 9.39, 178.23, 0.0, 258.69),
               el(0.01, 6.97, 342.02, 0.0, 234.98)};
  s.payload_kg = {60, 90, 50, 70, 80};
  s.profit = {1, 3, 2, 3, 1};
  s.t_svc_tu = 2.0 * 24.0 / s.units.tu_hours();
  s.validate();
  return s;
}

Scenario generate_instance(std::uint64_t seed, int n_r, int n_t) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Scenario base = case_study_scenario();
  Scenario s;
  s.units = base.units;
  s.depot = base.depot;
  s.t_svc_tu = base.t_svc_tu;
  s.sets = build_index_sets(3, 3, n_r, n_t);

  auto random_el = [&]() {
    OrbitalElements o;
    o.a = 1.0;
    o.e = 0.01 * unif(rng);
    o.i = 30.0 * kDegToRad * unif(rng);
    o.raan = 2.0 * M_PI * unif(rng);
    o.argp = 2.0 * M_PI * unif(rng);
    o.M0 = 2.0 * M_PI * unif(rng);
    return o;
  };
  for (int i = 0; i < n_r; ++i) s.stations.push_back(random_el());
  for (int i = 0; i < n_t; ++i) {
    s.targets.push_back(random_el());
    s.payload_kg.push_back(50.0 + 50.0 * unif(rng));
    s.profit.push_back(1.0 + static_cast<double>(rng() % 3));
  }
  s.validate();
  return s;
}

}  // namespace vrtpp
