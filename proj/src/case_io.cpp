#include "ucr/case_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace ucr {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct RawMatrix {
  std::vector<std::vector<double>> rows;
  std::vector<int> line_numbers;  // source line of each row
};

// Strips a '%' comment, returns the content part.
std::string strip_comment(const std::string& line) {
  auto pos = line.find('%');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

void PowerNetwork::validate() const {
  const int nv = n_buses();
  std::unordered_set<int> ids;
  for (const Bus& b : buses) {
    if (!ids.insert(b.id).second)
      throw std::invalid_argument("duplicate bus id " + std::to_string(b.id));
    if (b.v_min > b.v_max)
      throw std::invalid_argument("bus " + std::to_string(b.id) + ": v_min > v_max");
  }
  for (size_t l = 0; l < branches.size(); ++l) {
    const Branch& br = branches[l];
    if (br.from < 0 || br.from >= nv || br.to < 0 || br.to >= nv)
      throw std::invalid_argument("branch " + std::to_string(l) + ": endpoint out of range");
    if (br.tap <= 0.0)
      throw std::invalid_argument("branch " + std::to_string(l) + ": nonpositive tap");
  }
  for (size_t g = 0; g < generators.size(); ++g) {
    const Generator& gen = generators[g];
    if (gen.bus < 0 || gen.bus >= nv)
      throw std::invalid_argument("generator " + std::to_string(g) + ": bus out of range");
    if (gen.p_min > gen.p_max || gen.q_min > gen.q_max)
      throw std::invalid_argument("generator " + std::to_string(g) + ": inverted limits");
  }
}

void UcInstance::validate() const {
  network.validate();
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (demand.rows() != network.n_buses() || demand.cols() != horizon)
    throw std::invalid_argument("demand dimensions do not match network/horizon");
  if (static_cast<int>(economics.size()) != network.n_generators() ||
      static_cast<int>(initial.size()) != network.n_generators())
    throw std::invalid_argument("per-generator data size mismatch");
  for (const UcEconomics& e : economics) {
    if (e.min_up < 1 || e.min_dn < 1)
      throw std::invalid_argument("minimum up/down times must be >= 1");
    if (e.ramp < 0 || e.startstop < 0 || e.alpha < 0 || e.beta < 0 ||
        e.gamma < 0 || e.gamma_up < 0 || e.gamma_dn < 0)
      throw std::invalid_argument("negative economic parameter");
  }
}

PowerNetwork parse_matpower(std::istream& text) {
  double base_mva = 0.0;
  bool have_base = false;
  std::unordered_map<std::string, RawMatrix> mats;

  std::string line;
  int lineno = 0;
  std::string current;  // matrix currently being filled, empty if none
  while (std::getline(text, line)) {
    ++lineno;
    std::string body = strip_comment(line);
    if (current.empty()) {
      auto eq = body.find('=');
      auto mpc = body.find("mpc.");
      if (mpc == std::string::npos || eq == std::string::npos) continue;
      std::string key = body.substr(mpc + 4, eq - mpc - 4);
      key.erase(key.find_last_not_of(" \t") + 1);
      std::string rhs = body.substr(eq + 1);
      if (key == "baseMVA") {
        std::istringstream ss(rhs);
        char c;
        if (!(ss >> base_mva))
          throw ParseError("line " + std::to_string(lineno) + ": bad baseMVA");
        if (ss >> c && c != ';')
          throw ParseError("line " + std::to_string(lineno) + ": bad baseMVA");
        have_base = true;
        continue;
      }
      if (key == "bus" || key == "gen" || key == "branch" || key == "gencost") {
        auto open = rhs.find('[');
        if (open == std::string::npos) continue;  // not matrix syntax, skip
        current = key;
        body = rhs.substr(open + 1);
      } else {
        continue;  // unknown field, skipped without error
      }
    }
    // Inside matrix "current": accumulate rows until "]".
    bool closing = false;
    auto close = body.find(']');
    if (close != std::string::npos) {
      body = body.substr(0, close);
      closing = true;
    }
    // Rows may be terminated by ';' and several may share a line.
    std::istringstream rows(body);
    std::string row;
    while (std::getline(rows, row, ';')) {
      std::istringstream vals(row);
      std::vector<double> v;
      double d;
      while (vals >> d) v.push_back(d);
      if (!vals.eof()) {
        std::string tok;
        vals.clear();
        vals >> tok;
        throw ParseError("line " + std::to_string(lineno) + ": bad token '" + tok +
                         "' in mpc." + current);
      }
      if (!v.empty()) {
        mats[current].rows.push_back(std::move(v));
        mats[current].line_numbers.push_back(lineno);
      }
    }
    if (closing) current.clear();
  }

  if (!have_base) throw ParseError("missing baseMVA");
  for (const char* req : {"bus", "gen", "branch", "gencost"})
    if (!mats.count(req)) throw ParseError(std::string("missing mpc.") + req);

  PowerNetwork net;
  net.base_mva = base_mva;

  const RawMatrix& busm = mats["bus"];
  std::unordered_map<int, int> bus_index;
  for (size_t i = 0; i < busm.rows.size(); ++i) {
    const auto& row = busm.rows[i];
    if (row.size() < 13)
      throw ParseError("line " + std::to_string(busm.line_numbers[i]) +
                       ": bus row has " + std::to_string(row.size()) +
                       " columns, 13 expected");
    Bus b;
    b.id = static_cast<int>(row[0]);
    b.demand = Complex(row[2], row[3]) / base_mva;
    b.shunt = Complex(row[4], row[5]) / base_mva;
    b.v_max = row[11];
    b.v_min = row[12];
    bus_index[b.id] = static_cast<int>(net.buses.size());
    net.buses.push_back(b);
  }

  auto lookup = [&](double id_raw, int lineno_) {
    int id = static_cast<int>(id_raw);
    auto it = bus_index.find(id);
    if (it == bus_index.end())
      throw std::invalid_argument("line " + std::to_string(lineno_) +
                                  ": unknown bus " + std::to_string(id));
    return it->second;
  };

  const RawMatrix& genm = mats["gen"];
  for (size_t i = 0; i < genm.rows.size(); ++i) {
    const auto& row = genm.rows[i];
    if (row.size() < 10)
      throw ParseError("line " + std::to_string(genm.line_numbers[i]) +
                       ": gen row has " + std::to_string(row.size()) +
                       " columns, >= 10 expected");
    if (row[7] <= 0.0) continue;       // out of service
    if (row[8] <= 0.0) continue;       // nonpositive capacity, removed
    Generator g;
    g.bus = lookup(row[0], genm.line_numbers[i]);
    g.q_max = row[3] / base_mva;
    g.q_min = row[4] / base_mva;
    g.p_max = row[8] / base_mva;
    g.p_min = row[9] / base_mva;
    net.generators.push_back(g);
  }

  const RawMatrix& brm = mats["branch"];
  for (size_t i = 0; i < brm.rows.size(); ++i) {
    const auto& row = brm.rows[i];
    if (row.size() < 13)
      throw ParseError("line " + std::to_string(brm.line_numbers[i]) +
                       ": branch row has " + std::to_string(row.size()) +
                       " columns, 13 expected");
    if (row[10] == 0.0) continue;  // out of service
    Branch br;
    br.from = lookup(row[0], brm.line_numbers[i]);
    br.to = lookup(row[1], brm.line_numbers[i]);
    br.r = row[2];
    br.x = row[3];
    br.b_prl = row[4];
    double rate_a = row[5];
    br.unlimited = rate_a == 0.0;
    br.f_max = br.unlimited ? 0.0 : rate_a / base_mva;
    br.tap = row[8] == 0.0 ? 1.0 : row[8];
    br.shift = row[9] * kPi / 180.0;
    net.branches.push_back(br);
  }

  // gencost rows are parsed for structural sanity but otherwise ignored:
  // instance generation draws its own coefficients.
  for (size_t i = 0; i < mats["gencost"].rows.size(); ++i) {
    if (mats["gencost"].rows[i].size() < 4)
      throw ParseError("line " + std::to_string(mats["gencost"].line_numbers[i]) +
                       ": gencost row too short");
  }

  net.validate();
  return net;
}

PowerNetwork parse_matpower_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return parse_matpower(in);
}

namespace {

using nlohmann::json;

constexpr const char* kVersionTag = "ucr-instance-1";

json cplx(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex as_cplx(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("expected [re, im] pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

}  // namespace

void write_instance(const UcInstance& inst, std::ostream& sink) {
  json j;
  j["version"] = kVersionTag;
  j["base_mva"] = inst.network.base_mva;
  json buses = json::array();
  for (const Bus& b : inst.network.buses)
    buses.push_back({{"id", b.id},
                     {"shunt", cplx(b.shunt)},
                     {"v_min", b.v_min},
                     {"v_max", b.v_max},
                     {"demand", cplx(b.demand)}});
  j["buses"] = std::move(buses);
  json branches = json::array();
  for (const Branch& br : inst.network.branches)
    branches.push_back({{"from", br.from},
                        {"to", br.to},
                        {"r", br.r},
                        {"x", br.x},
                        {"b_prl", br.b_prl},
                        {"tap", br.tap},
                        {"shift", br.shift},
                        {"f_max", br.f_max},
                        {"unlimited", br.unlimited}});
  j["branches"] = std::move(branches);
  json gens = json::array();
  for (const Generator& g : inst.network.generators)
    gens.push_back({{"bus", g.bus},
                    {"p_min", g.p_min},
                    {"p_max", g.p_max},
                    {"q_min", g.q_min},
                    {"q_max", g.q_max}});
  j["generators"] = std::move(gens);
  j["horizon"] = inst.horizon;
  json demand = json::array();
  for (int k = 0; k < inst.demand.rows(); ++k) {
    json row = json::array();
    for (int t = 0; t < inst.demand.cols(); ++t) row.push_back(cplx(inst.demand(k, t)));
    demand.push_back(std::move(row));
  }
  j["demand"] = std::move(demand);
  json econ = json::array();
  for (const UcEconomics& e : inst.economics)
    econ.push_back({{"alpha", e.alpha},
                    {"beta", e.beta},
                    {"gamma", e.gamma},
                    {"gamma_up", e.gamma_up},
                    {"gamma_dn", e.gamma_dn},
                    {"ramp", e.ramp},
                    {"startstop", e.startstop},
                    {"min_up", e.min_up},
                    {"min_dn", e.min_dn}});
  j["economics"] = std::move(econ);
  json init = json::array();
  for (const InitialState& s : inst.initial)
    init.push_back({{"status", s.status}, {"p0", s.p0}, {"held_for", s.held_for}});
  j["initial"] = std::move(init);
  j["seed"] = inst.seed;
  sink << j.dump(2) << '\n';
}

UcInstance read_instance(std::istream& source) {
  json j;
  try {
    source >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad instance file: ") + e.what());
  }
  try {
    if (j.at("version").get<std::string>() != kVersionTag)
      throw ParseError("instance version tag mismatch");
    UcInstance inst;
    inst.network.base_mva = j.at("base_mva").get<double>();
    for (const json& b : j.at("buses")) {
      Bus bus;
      bus.id = b.at("id").get<int>();
      bus.shunt = as_cplx(b.at("shunt"));
      bus.v_min = b.at("v_min").get<double>();
      bus.v_max = b.at("v_max").get<double>();
      bus.demand = as_cplx(b.at("demand"));
      inst.network.buses.push_back(bus);
    }
    for (const json& b : j.at("branches")) {
      Branch br;
      br.from = b.at("from").get<int>();
      br.to = b.at("to").get<int>();
      br.r = b.at("r").get<double>();
      br.x = b.at("x").get<double>();
      br.b_prl = b.at("b_prl").get<double>();
      br.tap = b.at("tap").get<double>();
      br.shift = b.at("shift").get<double>();
      br.f_max = b.at("f_max").get<double>();
      br.unlimited = b.at("unlimited").get<bool>();
      inst.network.branches.push_back(br);
    }
    for (const json& g : j.at("generators")) {
      Generator gen;
      gen.bus = g.at("bus").get<int>();
      gen.p_min = g.at("p_min").get<double>();
      gen.p_max = g.at("p_max").get<double>();
      gen.q_min = g.at("q_min").get<double>();
      gen.q_max = g.at("q_max").get<double>();
      inst.network.generators.push_back(gen);
    }
    inst.horizon = j.at("horizon").get<int>();
    const json& demand = j.at("demand");
    inst.demand.resize(inst.network.n_buses(), std::max(inst.horizon, 0));
    if (static_cast<int>(demand.size()) != inst.network.n_buses())
      throw ParseError("demand row count mismatch");
    for (int k = 0; k < inst.network.n_buses(); ++k) {
      if (static_cast<int>(demand[k].size()) != inst.horizon)
        throw ParseError("demand column count mismatch");
      for (int t = 0; t < inst.horizon; ++t) inst.demand(k, t) = as_cplx(demand[k][t]);
    }
    for (const json& e : j.at("economics")) {
      UcEconomics econ;
      econ.alpha = e.at("alpha").get<double>();
      econ.beta = e.at("beta").get<double>();
      econ.gamma = e.at("gamma").get<double>();
      econ.gamma_up = e.at("gamma_up").get<double>();
      econ.gamma_dn = e.at("gamma_dn").get<double>();
      econ.ramp = e.at("ramp").get<double>();
      econ.startstop = e.at("startstop").get<double>();
      econ.min_up = e.at("min_up").get<int>();
      econ.min_dn = e.at("min_dn").get<int>();
      inst.economics.push_back(econ);
    }
    for (const json& s : j.at("initial")) {
      InitialState init;
      init.status = s.at("status").get<int>();
      init.p0 = s.at("p0").get<double>();
      init.held_for = s.at("held_for").get<int>();
      inst.initial.push_back(init);
    }
    inst.seed = j.at("seed").get<std::uint64_t>();
    inst.validate();
    return inst;
  } catch (const json::exception& e) {
    throw ParseError(std::string("missing or malformed field: ") + e.what());
  }
}

void write_instance_file(const UcInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  write_instance(inst, out);
}

UcInstance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_instance(in);
}

}  // namespace ucr
