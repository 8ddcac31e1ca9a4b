// Command-line front end: convert MATPOWER cases into instances, run the
// sequential penalized relaxation, check candidates, and compute bounds.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ucr/bounds.hpp"
#include "ucr/case_io.hpp"
#include "ucr/driver.hpp"
#include "ucr/instance_gen.hpp"
#include "ucr/network.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Solution files.

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json cmatrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  if (rows.empty()) return {};
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j].get<double>();
  return m;
}

Eigen::MatrixXcd cmatrix_from_json(const json& rows) {
  if (rows.empty()) return {};
  Eigen::MatrixXcd m(rows.size(), rows[0].size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = std::complex<double>(rows[i][j][0].get<double>(),
                                     rows[i][j][1].get<double>());
  return m;
}

void write_solution(const ucr::RunResult& rr, const std::string& path) {
  json doc;
  doc["version"] = 1;
  doc["feasible"] = rr.feasible;
  doc["cost"] = rr.best_cost;
  doc["x"] = matrix_to_json(rr.best.x);
  doc["p"] = matrix_to_json(rr.best.p);
  doc["q"] = matrix_to_json(rr.best.q);
  doc["v"] = cmatrix_to_json(rr.best.v);
  std::ofstream out(path, std::ios::binary);
  out << doc.dump(1) << "\n";
}

ucr::Candidate read_solution(const std::string& path, double& cost, bool& feasible) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open solution file: " + path);
  json doc = json::parse(in);
  if (doc.value("version", 0) != 1)
    throw std::runtime_error("unsupported solution file version");
  ucr::Candidate cand;
  cand.x = matrix_from_json(doc.at("x"));
  cand.p = matrix_from_json(doc.at("p"));
  cand.q = matrix_from_json(doc.at("q"));
  cand.v = cmatrix_from_json(doc.at("v"));
  cost = doc.value("cost", 0.0);
  feasible = doc.value("feasible", false);
  return cand;
}

// ---------------------------------------------------------------------------
// Convergence CSV and plot.

void write_csv(const std::vector<ucr::RoundLog>& logs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  out << "round,objective_cost,penalty_value,max_violation,integrality_gap,"
         "solver_status,wall_seconds\n";
  char buf[256];
  for (const ucr::RoundLog& l : logs) {
    std::snprintf(buf, sizeof buf, "%d,%.10e,%.10e,%.10e,%.10e,%s,%.3f\n", l.round,
                  l.objective_cost, l.penalty_value, l.max_violation,
                  l.integrality_gap, ucr::conic::to_string(l.solver_status).c_str(),
                  l.wall_seconds);
    out << buf;
  }
}

// A minimal line chart of objective cost per round; no dependencies.
void write_svg(const std::vector<ucr::RoundLog>& logs, const std::string& path) {
  if (logs.empty()) return;
  const double W = 640, H = 400, ml = 70, mr = 20, mt = 20, mb = 40;
  double lo = logs.front().objective_cost, hi = lo;
  for (const auto& l : logs) {
    lo = std::min(lo, l.objective_cost);
    hi = std::max(hi, l.objective_cost);
  }
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) hi = lo + 1.0;
  auto px = [&](int round) {
    double f = logs.size() > 1 ? double(round - 1) / double(logs.size() - 1) : 0.5;
    return ml + f * (W - ml - mr);
  };
  auto py = [&](double c) { return H - mb - (c - lo) / (hi - lo) * (H - mt - mb); };
  std::ofstream out(path, std::ios::binary);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
      << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << H - mb << "\" stroke=\"black\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (const auto& l : logs) out << px(l.round) << "," << py(l.objective_cost) << " ";
  out << "\"/>\n";
  for (const auto& l : logs)
    out << "<circle cx=\"" << px(l.round) << "\" cy=\"" << py(l.objective_cost)
        << "\" r=\"2.5\" fill=\"steelblue\"/>\n";
  out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 8
      << "\" text-anchor=\"middle\" font-size=\"13\">round</text>\n"
      << "<text x=\"14\" y=\"" << (mt + H - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 14 "
      << (mt + H - mb) / 2 << ")\">objective cost ($)</text>\n"
      << "<text x=\"" << ml - 6 << "\" y=\"" << py(lo) + 4
      << "\" text-anchor=\"end\" font-size=\"11\">" << std::scientific << lo
      << "</text>\n"
      << "<text x=\"" << ml - 6 << "\" y=\"" << py(hi) + 4
      << "\" text-anchor=\"end\" font-size=\"11\">" << hi << "</text>\n"
      << "</svg>\n";
}

// Named mu/alpha presets matching the benchmark settings.
bool apply_preset(const std::string& name, double& mu, double& alpha) {
  if (name == "case57") {
    mu = 1.0;
    alpha = 1.0;
  } else if (name == "case118") {
    mu = 1.0;
    alpha = 10.0;
  } else if (name == "case300") {
    mu = 10.0;
    alpha = 10.0;
  } else {
    return false;
  }
  return true;
}

int first_feasible_round(const std::vector<ucr::RoundLog>& logs, double tol) {
  for (const auto& l : logs)
    if (l.max_violation < tol) return l.round;
  return -1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AC unit commitment via sequential penalized conic relaxation"};
  app.require_subcommand(1);

  // --- convert ---
  std::string cv_case, cv_out = "instance.json";
  int cv_horizon = 24;
  std::uint64_t cv_seed = 1;
  auto* convert = app.add_subcommand(
      "convert", "Parse a MATPOWER case and generate a seeded UC instance");
  convert->add_option("case", cv_case, "MATPOWER .m case file")->required();
  convert->add_option("-o,--out", cv_out, "Instance file to write");
  convert->add_option("--horizon", cv_horizon, "Scheduling horizon (hours)");
  convert->add_option("--seed", cv_seed, "Monte Carlo seed");

  // --- solve ---
  std::vector<std::string> sv_insts;
  std::string sv_out = "run", sv_mode = "socp", sv_preset;
  double sv_mu = 1.0, sv_alpha = 1.0, sv_eta = 0.5, sv_tol = 1e-6;
  int sv_rounds = 50, sv_jobs = 1;
  bool sv_plot = false, sv_verbose = false;
  auto* solve =
      app.add_subcommand("solve", "Run the sequential penalized relaxation");
  solve->add_option("instance", sv_insts, "Instance file(s)")->required();
  solve->add_option("--out", sv_out, "Output directory");
  solve->add_option("--mu", sv_mu, "Penalty weight");
  solve->add_option("--alpha", sv_alpha, "Penalty matrix diagonal weight");
  solve->add_option("--eta", sv_eta, "Penalty matrix edge weight");
  solve->add_option("--rounds", sv_rounds, "Maximum rounds");
  solve->add_option("--tol-feas", sv_tol, "Feasibility tolerance (p.u.)");
  solve->add_option("--mode", sv_mode, "Relaxation mode: socp or sdp");
  solve->add_option("--preset", sv_preset, "mu/alpha preset: case57, case118, case300");
  solve->add_option("--jobs", sv_jobs, "Parallel workers across instances");
  solve->add_flag("--plot", sv_plot, "Also write an SVG cost-per-round chart");
  solve->add_flag("-v,--verbose", sv_verbose, "Per-round progress on stderr");

  // --- check ---
  std::string ck_inst, ck_sol;
  auto* checkc = app.add_subcommand("check", "Evaluate a solution's violations");
  checkc->add_option("instance", ck_inst, "Instance file")->required();
  checkc->add_option("solution", ck_sol, "Solution file")->required();

  // --- bound ---
  std::string bd_inst, bd_mode = "socp";
  auto* boundc = app.add_subcommand("bound", "Unpenalized relaxation lower bound");
  boundc->add_option("instance", bd_inst, "Instance file")->required();
  boundc->add_option("--mode", bd_mode, "socp or sdp");

  // --- gap ---
  std::string gp_inst, gp_sol, gp_mode = "sdp";
  auto* gapc = app.add_subcommand("gap", "GAP% of a solution vs a fresh bound");
  gapc->add_option("instance", gp_inst, "Instance file")->required();
  gapc->add_option("solution", gp_sol, "Solution file")->required();
  gapc->add_option("--mode", gp_mode, "socp or sdp");

  // --- report ---
  std::vector<std::string> rp_dirs;
  auto* reportc =
      app.add_subcommand("report", "Summarize solve runs from persisted files");
  reportc->add_option("run", rp_dirs, "Run director(ies) written by solve")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (*convert) {
      ucr::PowerNetwork net = ucr::parse_matpower_file(cv_case);
      ucr::UcInstance inst = ucr::generate(net, cv_seed, cv_horizon);
      ucr::write_instance_file(inst, cv_out);
      std::printf("wrote %s (%d buses, %d generators, horizon %d, seed %llu)\n",
                  cv_out.c_str(), net.n_buses(), net.n_generators(), cv_horizon,
                  static_cast<unsigned long long>(cv_seed));
      return 0;
    }

    if (*solve) {
      ucr::RunOptions opts;
      if (!sv_preset.empty() && !apply_preset(sv_preset, sv_mu, sv_alpha)) {
        std::fprintf(stderr, "unknown preset '%s'\n", sv_preset.c_str());
        return 2;
      }
      opts.mu = sv_mu;
      opts.alpha = sv_alpha;
      opts.eta = sv_eta;
      opts.rounds = sv_rounds;
      opts.tol_feas = sv_tol;
      opts.verbose = sv_verbose;
      if (sv_mode == "sdp")
        opts.mode = ucr::Mode::FullSdp;
      else if (sv_mode != "socp") {
        std::fprintf(stderr, "unknown mode '%s'\n", sv_mode.c_str());
        return 2;
      }
      std::mutex io;
      std::vector<int> codes(sv_insts.size(), 0);
      std::size_t next = 0;
      std::mutex qlock;
      auto worker = [&]() {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> g(qlock);
            if (next >= sv_insts.size()) return;
            i = next++;
          }
          const std::string& path = sv_insts[i];
          ucr::UcInstance inst = ucr::read_instance_file(path);
          ucr::RunResult rr = ucr::run(inst, opts);
          fs::path dir = sv_insts.size() == 1
                             ? fs::path(sv_out)
                             : fs::path(sv_out) / fs::path(path).stem();
          fs::create_directories(dir);
          write_solution(rr, (dir / "solution.json").string());
          write_csv(rr.logs, (dir / "convergence.csv").string());
          if (sv_plot) write_svg(rr.logs, (dir / "convergence.svg").string());
          std::lock_guard<std::mutex> g(io);
          int kf = first_feasible_round(rr.logs, opts.tol_feas);
          std::printf("%s: %s cost %.2f k_f %s rounds %zu%s%s\n", path.c_str(),
                      rr.feasible ? "feasible" : "INFEASIBLE", rr.best_cost,
                      kf > 0 ? std::to_string(kf).c_str() : "-", rr.logs.size(),
                      rr.error.empty() ? "" : " error: ", rr.error.c_str());
          if (!rr.feasible) codes[i] = 1;
        }
      };
      std::vector<std::thread> pool;
      int nthreads = std::max(1, std::min<int>(sv_jobs, sv_insts.size()));
      for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
      return *std::max_element(codes.begin(), codes.end());
    }

    if (*checkc) {
      ucr::UcInstance inst = ucr::read_instance_file(ck_inst);
      double cost;
      bool claimed;
      ucr::Candidate cand = read_solution(ck_sol, cost, claimed);
      ucr::NetworkMatrices mats = ucr::build_matrices(inst.network);
      ucr::ViolationReport rep = ucr::check(inst, mats, cand);
      std::printf("power_balance  %.3e\n", rep.power_balance);
      std::printf("flow_limit     %.3e\n", rep.flow_limit);
      std::printf("voltage_bounds %.3e\n", rep.voltage_bounds);
      std::printf("integrality    %.3e\n", rep.integrality);
      std::printf("capacity       %.3e\n", rep.capacity);
      std::printf("ramp           %.3e\n", rep.ramp);
      std::printf("min_up_down    %.3e\n", rep.min_up_down);
      std::printf("cost_identity  %.3e\n", rep.cost_identity);
      std::printf("max_violation  %.3e -> %s\n", rep.max_violation,
                  rep.feasible ? "feasible" : "infeasible");
      return rep.feasible ? 0 : 1;
    }

    if (*boundc) {
      ucr::UcInstance inst = ucr::read_instance_file(bd_inst);
      ucr::Mode mode = bd_mode == "sdp" ? ucr::Mode::FullSdp : ucr::Mode::EdgeSocp;
      double b = ucr::lower_bound(inst, mode);
      std::printf("%.6f\n", b);
      return 0;
    }

    if (*gapc) {
      ucr::UcInstance inst = ucr::read_instance_file(gp_inst);
      double cost;
      bool claimed;
      read_solution(gp_sol, cost, claimed);
      ucr::Mode mode = gp_mode == "sdp" ? ucr::Mode::FullSdp : ucr::Mode::EdgeSocp;
      double b = ucr::lower_bound(inst, mode);
      std::printf("%.2f\n", ucr::gap_percent(cost, b));
      return 0;
    }

    if (*reportc) {
      std::printf("%-24s %6s %14s %10s %8s\n", "run", "k_f", "cost", "t(s)",
                  "status");
      int code = 0;
      for (const std::string& d : rp_dirs) {
        std::ifstream csv(fs::path(d) / "convergence.csv");
        if (!csv) {
          std::fprintf(stderr, "%s: no convergence.csv\n", d.c_str());
          code = 1;
          continue;
        }
        std::string line;
        std::getline(csv, line);  // header
        int kf = -1, rounds = 0;
        double total = 0.0;
        while (std::getline(csv, line)) {
          std::stringstream ss(line);
          std::string f;
          std::vector<std::string> fields;
          while (std::getline(ss, f, ',')) fields.push_back(f);
          if (fields.size() != 7) continue;
          ++rounds;
          if (kf < 0 && std::stod(fields[3]) < 1e-6) kf = std::stoi(fields[0]);
          total += std::stod(fields[6]);
        }
        double cost = 0.0;
        bool feasible = false;
        try {
          read_solution((fs::path(d) / "solution.json").string(), cost, feasible);
        } catch (const std::exception&) {
        }
        std::printf("%-24s %6s %14.2f %10.1f %8s\n", d.c_str(),
                    kf > 0 ? std::to_string(kf).c_str() : "-", cost, total,
                    feasible ? "feasible" : "infeasible");
        if (!feasible) code = 1;
      }
      return code;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
