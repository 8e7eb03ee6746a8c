// SPDX-License-Identifier: Apache-2.0
//
// phsg: command-line front end for the port-Hamiltonian stochastic Galerkin
// library. Subcommands build SG block systems (Matrix Market + JSON sidecar
// + validation report), run transformation-convergence studies, simulate
// transients with output statistics and Hamiltonian traces, sweep model
// order reduction methods, and export Bode data. All outputs are
// deterministic: the same configuration produces byte-identical files.

#include "phsg/analysis.hpp"
#include "phsg/chaos.hpp"
#include "phsg/io.hpp"
#include "phsg/models.hpp"
#include "phsg/mor.hpp"
#include "phsg/ode.hpp"
#include "phsg/ph_system.hpp"
#include "phsg/sg.hpp"
#include "phsg/types.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

using namespace phsg;
using nlohmann::json;

enum class Transform { None, BasisSqrt, BasisCholesky, Image };

Transform parse_transform(const std::string& text) {
  if (text == "none") return Transform::None;
  if (text == "basis-sqrt") return Transform::BasisSqrt;
  if (text == "basis-cholesky") return Transform::BasisCholesky;
  if (text == "image") return Transform::Image;
  throw ConfigError("unknown transformation: " + text +
                    " (expected none, basis-sqrt, basis-cholesky, image)");
}

struct RunConfig {
  std::string model = "motor";
  std::string transform = "basis-sqrt";
  int degree = 2;
  double variation = 10.0;  ///< percent
  int quad_points = 7;
  std::string io_mode = "simo";
  std::string method = "bt";
  long r_min = 5;
  long r_max = 60;
  double rtol = 1e-8;
  double atol = 1e-10;
  double t_end = 300.0;
  std::string out_dir = ".";
  long seed = 0;
  int oracle_nodes = 0;
};

/// Dense-solve cap from the environment (default 4000).
Index max_dense_dim() {
  const char* v = std::getenv("PHSG_MAX_DIM");
  if (v == nullptr || *v == '\0') return 4000;
  char* end = nullptr;
  const long parsed = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || parsed <= 0) {
    throw ConfigError(std::string("PHSG_MAX_DIM must be a positive integer, "
                                  "got '") +
                      v + "'");
  }
  return static_cast<Index>(parsed);
}

json config_json(const RunConfig& cfg, const std::string& command) {
  json j;
  j["tool"] = io::tool_version();
  j["command"] = command;
  j["model"] = cfg.model;
  j["transform"] = cfg.transform;
  j["degree"] = cfg.degree;
  j["variation"] = cfg.variation;
  j["quad_points"] = cfg.quad_points;
  j["io_mode"] = cfg.io_mode;
  j["method"] = cfg.method;
  j["r_min"] = cfg.r_min;
  j["r_max"] = cfg.r_max;
  j["rtol"] = cfg.rtol;
  j["atol"] = cfg.atol;
  j["t_end"] = cfg.t_end;
  j["seed"] = cfg.seed;
  j["oracle_nodes"] = cfg.oracle_nodes;
  return j;
}

/// `<out-dir>/<command>_<model>_<d>_<variation>` (no extension).
std::string artifact_stem(const RunConfig& cfg, const std::string& command) {
  const ModelPreset preset = parse_preset(cfg.model);
  std::filesystem::create_directories(cfg.out_dir);
  const std::string base = command + "_" + preset.name() + "_" +
                           std::to_string(cfg.degree) + "_" +
                           io::format_number(cfg.variation);
  return (std::filesystem::path(cfg.out_dir) / base).string();
}

ParametricStandardPH apply_transform(const ParametricPHSystem& sys,
                                     Transform t) {
  switch (t) {
    case Transform::BasisSqrt:
      return basis_transform(sys, Factorization::Sqrt);
    case Transform::BasisCholesky:
      return basis_transform(sys, Factorization::Cholesky);
    case Transform::Image:
      return image_transform(sys);
    case Transform::None:
      break;
  }
  throw ConfigError("this command requires a structure-preserving "
                    "transformation (basis-sqrt, basis-cholesky, or image)");
}

SGOptions sg_options(const RunConfig& cfg) {
  SGOptions opts;
  opts.quad_points = cfg.quad_points;
  return opts;
}

OdeOptions ode_options(const RunConfig& cfg) {
  OdeOptions opts;
  opts.rtol = cfg.rtol;
  opts.atol = cfg.atol;
  return opts;
}

InputFn base_chirp(Index m) {
  return [m](double t) { return Vector::Constant(m, chirp(t)); };
}

// ---------------------------------------------------------------------------
// sg-build
// ---------------------------------------------------------------------------

int cmd_sg_build(const RunConfig& cfg) {
  const ModelPreset preset = parse_preset(cfg.model);
  const ParametricPHSystem par = make_model(preset, cfg.variation);
  const ChaosBasis basis = ChaosBasis::make(par.box.dims(), cfg.degree);
  const SGOptions opts = sg_options(cfg);
  const Transform transform = parse_transform(cfg.transform);
  const std::string provenance = config_json(cfg, "sg-build").dump();
  const std::string stem = artifact_stem(cfg, "sg-build");
  const Index cap = max_dense_dim();

  std::ostringstream report;
  report << "model: " << preset.name() << "\n"
         << "transformation: " << cfg.transform << "\n"
         << "parameters: q = " << basis.q << ", degree d = " << basis.d
         << ", modes s = " << basis.size() << "\n";

  if (transform == Transform::None) {
    const LTISystem lti = assemble_sg_general(par, basis, opts);
    const Index ns = lti.n();
    report << "state dimension: " << ns << "\n"
           << "port dimension: " << lti.inputs() << "\n"
           << "structure: not claimed (untransformed coefficient projection;"
              " the realization is a general descriptor LTI system, not"
              " port-Hamiltonian)\n";
    io::write_matrix_market(stem + "_E.mtx", lti.E.sparseView(), provenance);
    io::write_matrix_market(stem + "_A.mtx", lti.A.sparseView(), provenance);
    io::write_matrix_market(stem + "_B.mtx", lti.B.sparseView(), provenance);
    io::write_matrix_market(stem + "_C.mtx", lti.C.sparseView(), provenance);
    io::write_matrix_market(stem + "_D.mtx", lti.D.sparseView(), provenance);
    json sidecar;
    sidecar["s"] = basis.size();
    sidecar["d"] = basis.d;
    sidecar["q"] = basis.q;
    sidecar["n"] = static_cast<long long>(par.n);
    sidecar["m"] = static_cast<long long>(par.m);
    sidecar["ns"] = static_cast<long long>(ns);
    sidecar["droptol"] = opts.droptol;
    sidecar["provenance"] = json::parse(provenance);
    io::write_text(stem + "_sidecar.json", sidecar.dump(2) + "\n");
  } else {
    const ParametricStandardPH std_sys = apply_transform(par, transform);
    const SGSystem sg = assemble_sg(std_sys, basis, opts);
    report << "state dimension: " << sg.ns() << "\n"
           << "port dimension: " << sg.ms() << "\n";
    if (sg.ns() <= cap) {
      const ValidationReport val = sg.validate();
      report << "structure: " << (val.passed() ? "port-Hamiltonian" : "FAILED")
             << "\n"
             << val.summary();
    } else {
      report << "structure: validation skipped (dimension " << sg.ns()
             << " exceeds PHSG_MAX_DIM = " << cap << ")\n";
    }
    const std::pair<const char*, const SparseMatrix*> slots[] = {
        {"E", &sg.E}, {"J", &sg.J}, {"R", &sg.R}, {"B", &sg.B},
        {"P", &sg.P}, {"S", &sg.S}, {"N", &sg.N}};
    for (const auto& [name, mat] : slots) {
      io::write_matrix_market(stem + "_" + std::string(name) + ".mtx", *mat,
                              provenance);
    }
    io::write_text(stem + "_sidecar.json",
                   io::sg_sidecar_json(sg, opts.droptol, provenance));
  }

  io::write_text(stem + "_report.txt", report.str());
  std::cout << report.str();
  std::cout << "artifacts: " << stem << "_*.mtx, _sidecar.json, _report.txt"
            << std::endl;
  return 0;
}

// ---------------------------------------------------------------------------
// convergence
// ---------------------------------------------------------------------------

int cmd_convergence(const RunConfig& cfg) {
  const ModelPreset preset = parse_preset(cfg.model);
  const ParametricPHSystem par = make_model(preset, cfg.variation);
  const SGOptions opts = sg_options(cfg);
  const Index cap = max_dense_dim();

  std::vector<std::pair<std::string, Transform>> transforms;
  const Transform requested = parse_transform(cfg.transform);
  if (requested == Transform::None) {
    transforms = {{"basis-sqrt", Transform::BasisSqrt},
                  {"image", Transform::Image}};
  } else {
    transforms = {{cfg.transform, requested}};
  }

  const std::vector<std::pair<std::string, IOMode>> modes = {
      {"SISO", IOMode::SISO}, {"SIMO", IOMode::SIMO}, {"MIMO", IOMode::MIMO}};

  std::vector<std::string> header = {"degree"};
  for (const auto& [tname, t] : transforms) {
    (void)t;
    for (const auto& [mname, m] : modes) {
      (void)m;
      header.push_back(transforms.size() == 1 ? mname : tname + "_" + mname);
    }
  }

  const std::string stem = artifact_stem(cfg, "convergence");
  io::CsvWriter csv(stem + ".csv", config_json(cfg, "convergence").dump(),
                    header);

  for (int d = 1; d <= cfg.degree; ++d) {
    const ChaosBasis basis = ChaosBasis::make(par.box.dims(), d);
    const int s = basis.size();
    const LTISystem h0 = assemble_sg_general(par, basis, opts);
    if (2 * h0.n() > cap) {
      throw ConfigError("convergence: augmented H2 dimension " +
                        std::to_string(2 * h0.n()) +
                        " exceeds PHSG_MAX_DIM = " + std::to_string(cap));
    }
    std::vector<double> row = {static_cast<double>(d)};
    for (const auto& [tname, t] : transforms) {
      (void)tname;
      const SGSystem sg = assemble_sg(apply_transform(par, t), basis, opts);
      for (const auto& [mname, mode] : modes) {
        (void)mname;
        const LTISystem h0m = io_restrict(h0, par.m, s, mode);
        const LTISystem him = io_restrict(sg, mode);
        row.push_back(rel_h2_difference(h0m, him));
      }
    }
    csv.row(row);
  }
  csv.close();
  std::cout << "wrote " << stem << ".csv" << std::endl;
  return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const RunConfig& cfg) {
  const ModelPreset preset = parse_preset(cfg.model);
  const ParametricPHSystem par = make_model(preset, cfg.variation);
  const ChaosBasis basis = ChaosBasis::make(par.box.dims(), cfg.degree);
  const SGOptions opts = sg_options(cfg);
  const Transform transform = parse_transform(cfg.transform);
  const IOMode mode = parse_io_mode(cfg.io_mode);
  if (mode == IOMode::SISO) {
    throw ConfigError("simulate: io-mode siso drops the higher-order output "
                      "modes needed for statistics; use simo or mimo");
  }
  if (!(cfg.t_end > 0.0)) throw ConfigError("simulate: --t-end must be > 0");

  const SGSystem sg = assemble_sg(apply_transform(par, transform), basis, opts);
  const LTISystem lti = io_restrict(sg, mode);
  const int s = basis.size();
  const Index m = sg.m;

  InputFn u = base_chirp(par.m);
  if (mode == IOMode::MIMO) u = lift_input(base_chirp(par.m), s, par.m);

  constexpr std::size_t kSamples = 2001;
  const Vector x0 = Vector::Zero(sg.ns());
  const TransientResult res =
      simulate(lti, u, x0, 0.0, cfg.t_end, kSamples, ode_options(cfg));
  const OutputStatistics stats = sg_output_statistics(res.outputs, s, m);
  const std::vector<double> ham = hamiltonian_trace(sg, res.states);

  std::vector<double> oracle;
  if (cfg.oracle_nodes > 0) {
    const QuadratureRule rule =
        QuadratureRule::tensor_gauss(par.box, cfg.oracle_nodes);
    oracle = sampled_expected_hamiltonian(par, base_chirp(par.m),
                                          Vector::Zero(par.n), rule, res.times,
                                          ode_options(cfg));
  }

  std::vector<std::string> header = {"t"};
  for (Index c = 0; c < res.outputs.cols(); ++c) {
    header.push_back("y" + std::to_string(c + 1));
  }
  for (Index c = 0; c < m; ++c) header.push_back("mean" + std::to_string(c + 1));
  for (Index c = 0; c < m; ++c) header.push_back("std" + std::to_string(c + 1));
  header.push_back("hamiltonian");
  if (!oracle.empty()) {
    header.push_back("oracle_hamiltonian");
    header.push_back("hamiltonian_difference");
  }

  const std::string stem = artifact_stem(cfg, "simulate");
  io::CsvWriter csv(stem + ".csv", config_json(cfg, "simulate").dump(),
                    header);
  for (std::size_t k = 0; k < res.times.size(); ++k) {
    std::vector<double> row;
    row.reserve(header.size());
    row.push_back(res.times[k]);
    const auto r = static_cast<Index>(k);
    for (Index c = 0; c < res.outputs.cols(); ++c)
      row.push_back(res.outputs(r, c));
    for (Index c = 0; c < m; ++c) row.push_back(stats.mean(r, c));
    for (Index c = 0; c < m; ++c) row.push_back(stats.std(r, c));
    row.push_back(ham[k]);
    if (!oracle.empty()) {
      row.push_back(oracle[k]);
      row.push_back(ham[k] - oracle[k]);
    }
    csv.row(row);
  }
  csv.close();
  std::cout << "wrote " << stem << ".csv (" << res.times.size()
            << " samples, " << res.stats.accepted << " accepted steps)"
            << std::endl;
  return 0;
}

// ---------------------------------------------------------------------------
// mor
// ---------------------------------------------------------------------------

int cmd_mor(const RunConfig& cfg) {
  const ModelPreset preset = parse_preset(cfg.model);
  const ParametricPHSystem par = make_model(preset, cfg.variation);
  const ChaosBasis basis = ChaosBasis::make(par.box.dims(), cfg.degree);
  const SGOptions opts = sg_options(cfg);
  const Transform transform = parse_transform(cfg.transform);
  const IOMode mode = parse_io_mode(cfg.io_mode);
  const Index cap = max_dense_dim();

  if (cfg.r_min < 1 || cfg.r_max < cfg.r_min) {
    throw ConfigError("mor: need 1 <= r-min <= r-max");
  }

  const SGSystem sg = assemble_sg(apply_transform(par, transform), basis, opts);
  const SparseLTISystem ssys = sparse_restrict(sg, mode);
  if (ssys.n() > cap) {
    throw ConfigError("mor: dimension " + std::to_string(ssys.n()) +
                      " exceeds PHSG_MAX_DIM = " + std::to_string(cap));
  }
  const LTISystem fom = densify(ssys);
  const H2Cache cache = h2_prepare(fom);
  const Index r_max = std::min<Index>(cfg.r_max, ssys.n());
  const int s = basis.size();

  const std::string stem = artifact_stem(cfg, "mor");
  const std::string provenance = config_json(cfg, "mor").dump();

  std::vector<std::string> header = {"r", "rel_error", "stable",
                                     "ph_structure"};
  if (cfg.method == "irka") header.push_back("converged");
  io::CsvWriter csv(stem + ".csv", provenance, header);

  auto emit = [&](Index r, double err, bool stable, bool ph,
                  std::optional<bool> converged) {
    std::vector<std::string> cells = {io::format_number(static_cast<double>(r)),
                                      io::format_number(err),
                                      stable ? "true" : "false",
                                      ph ? "true" : "false"};
    if (converged.has_value()) cells.push_back(*converged ? "true" : "false");
    csv.text_row(cells);
  };

  if (cfg.method == "bt") {
    const BtSweep sweep = bt_prepare(fom, cap);
    {
      io::CsvWriter hankel_csv(stem + "_hankel.csv", provenance,
                               {"index", "sigma"});
      for (Index i = 0; i < sweep.hankel.size(); ++i) {
        hankel_csv.row({static_cast<double>(i + 1), sweep.hankel[i]});
      }
      hankel_csv.close();
    }
    for (Index r = cfg.r_min; r <= std::min(r_max, sweep.rank); ++r) {
      const BtResult bt = bt_slice(sweep, r);
      emit(r, mor_rel_error(cache, bt.rom), stability(bt.rom), false,
           std::nullopt);
    }
  } else if (cfg.method == "arnoldi" || cfg.method == "irka") {
    ReducedPHSystem last_rom;
    bool have_rom = false;
    if (cfg.method == "arnoldi") {
      const ArnoldiResult ar = arnoldi_basis(ssys, r_max);
      for (Index r = cfg.r_min; r <= ar.v.cols(); ++r) {
        const ReducedPHSystem red = galerkin_reduce(sg, ar.v.leftCols(r));
        const LTISystem rom = io_restrict(to_lti(red.rom), sg.m, s, mode);
        emit(r, mor_rel_error(cache, rom), stability(rom),
             validate_standard(red.rom).passed(), std::nullopt);
        last_rom = red;
        have_rom = true;
      }
    } else {
      if (mode != IOMode::SISO) {
        throw ConfigError("mor: method irka requires --io-mode siso");
      }
      for (Index r = std::max<Index>(cfg.r_min, 2); r <= r_max; ++r) {
        const IrkaResult ir = irka_galerkin(ssys, r);
        const ReducedPHSystem red = galerkin_reduce(sg, ir.v);
        const LTISystem rom = io_restrict(to_lti(red.rom), sg.m, s, mode);
        emit(r, mor_rel_error(cache, rom), stability(rom),
             validate_standard(red.rom).passed(), ir.converged);
        last_rom = red;
        have_rom = true;
      }
    }
    if (have_rom) {
      io::write_model_json(stem + "_rom.json", last_rom.rom.as_ph(),
                           provenance);
    }
  } else {
    throw ConfigError("mor: unknown method '" + cfg.method +
                      "' (expected arnoldi, irka, bt)");
  }

  csv.close();
  std::cout << "wrote " << stem << ".csv" << std::endl;
  return 0;
}

// ---------------------------------------------------------------------------
// bode
// ---------------------------------------------------------------------------

int cmd_bode(const RunConfig& cfg) {
  const ModelPreset preset = parse_preset(cfg.model);
  const ParametricPHSystem par = make_model(preset, cfg.variation);
  const Transform transform = parse_transform(cfg.transform);
  const PHSystem mean_sys = par.eval(par.box.center());

  LTISystem lti;
  switch (transform) {
    case Transform::None:
      lti = to_lti(mean_sys);
      break;
    case Transform::BasisSqrt:
      lti = to_lti(basis_transform(mean_sys, Factorization::Sqrt).first);
      break;
    case Transform::BasisCholesky:
      lti = to_lti(basis_transform(mean_sys, Factorization::Cholesky).first);
      break;
    case Transform::Image:
      lti = to_lti(image_transform(mean_sys));
      break;
  }

  const FrequencyResponse resp = bode(lti);
  std::vector<std::string> header = {"omega"};
  const Index p = lti.inputs();
  for (Index o = 0; o < lti.outputs(); ++o) {
    for (Index i = 0; i < p; ++i) {
      const std::string ch = "_y" + std::to_string(o + 1) + "u" +
                             std::to_string(i + 1);
      header.push_back("mag_dB" + ch);
      header.push_back("phase_deg" + ch);
    }
  }

  const std::string stem = artifact_stem(cfg, "bode");
  io::CsvWriter csv(stem + ".csv", config_json(cfg, "bode").dump(), header);
  for (std::size_t k = 0; k < resp.frequencies.size(); ++k) {
    std::vector<double> row = {resp.frequencies[k]};
    const auto r = static_cast<Index>(k);
    for (Index ch = 0; ch < resp.magnitude_db.cols(); ++ch) {
      row.push_back(resp.magnitude_db(r, ch));
      row.push_back(resp.phase_deg(r, ch));
    }
    csv.row(row);
  }
  csv.close();
  std::cout << "wrote " << stem << ".csv" << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Structure-preserving stochastic Galerkin toolbox for "
               "port-Hamiltonian systems"};
  app.require_subcommand(1);

  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--model", cfg.model,
                    "Model preset: motor | ladder | ladder:k=<cells>");
    sub->add_option("--transform", cfg.transform,
                    "none | basis-sqrt | basis-cholesky | image");
    sub->add_option("--degree", cfg.degree, "Chaos total degree d")
        ->check(CLI::Range(0, 20));
    sub->add_option("--variation", cfg.variation,
                    "Parameter variation in percent");
    sub->add_option("--quad-points", cfg.quad_points,
                    "Gauss points per dimension for non-polynomial entries")
        ->check(CLI::Range(1, 64));
    sub->add_option("--io-mode", cfg.io_mode, "mimo | simo | siso");
    sub->add_option("--rtol", cfg.rtol, "Integrator relative tolerance");
    sub->add_option("--atol", cfg.atol, "Integrator absolute tolerance");
    sub->add_option("--t-end", cfg.t_end, "Simulation end time");
    sub->add_option("--out-dir", cfg.out_dir, "Output directory");
    sub->add_option("--seed", cfg.seed, "Seed echoed into provenance");
    sub->add_option("--oracle-nodes", cfg.oracle_nodes,
                    "Per-dimension quadrature nodes for the expected-"
                    "Hamiltonian oracle column (0 = off)")
        ->check(CLI::Range(0, 12));
    return sub;
  };

  CLI::App* sub_build =
      add_common(app.add_subcommand("sg-build",
                                    "Assemble the SG block system and write "
                                    "Matrix Market matrices, a JSON sidecar, "
                                    "and a validation report"));
  CLI::App* sub_conv =
      add_common(app.add_subcommand("convergence",
                                    "Relative H2 differences between the "
                                    "untransformed and transformed SG "
                                    "realizations per degree and I/O mode"));
  CLI::App* sub_sim =
      add_common(app.add_subcommand("simulate",
                                    "Chirp-driven SG transient: outputs, "
                                    "mean/std statistics, Hamiltonian trace"));
  CLI::App* sub_mor =
      add_common(app.add_subcommand("mor",
                                    "Reduction error sweep over reduced "
                                    "orders for one method"));
  sub_mor->add_option("--method", cfg.method, "arnoldi | irka | bt");
  sub_mor->add_option("--r-min", cfg.r_min, "Smallest reduced order")
      ->check(CLI::Range(1L, 100000L));
  sub_mor->add_option("--r-max", cfg.r_max, "Largest reduced order")
      ->check(CLI::Range(1L, 100000L));
  CLI::App* sub_bode =
      add_common(app.add_subcommand("bode",
                                    "Frequency response of the mean-parameter "
                                    "realization"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sub_build->parsed()) return cmd_sg_build(cfg);
    if (sub_conv->parsed()) return cmd_convergence(cfg);
    if (sub_sim->parsed()) return cmd_simulate(cfg);
    if (sub_mor->parsed()) return cmd_mor(cfg);
    if (sub_bode->parsed()) return cmd_bode(cfg);
    std::cerr << "no subcommand selected" << std::endl;
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  }
}
