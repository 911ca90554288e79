// Command-line front end: instance generation, membership and separation
// oracles, the conjecture and table experiments, and raw conic solves.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gdnn/experiments.hpp"
#include "gdnn/gcpp.hpp"
#include "gdnn/io.hpp"
#include "gdnn/membership.hpp"
#include "gdnn/rng.hpp"
#include "gdnn/separation.hpp"
#include "gdnn/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNonMember = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSolverFailure = 3;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text << std::endl;
  else
    gdnn::write_file(out_path, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GDNN cone toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  double tol = 1e-7;
  int workers = 1;
  std::string out_path;
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--tol", tol, "membership / separation tolerance")
      ->capture_default_str();
  app.add_option("--workers", workers, "parallel workers for sweeps")
      ->capture_default_str();
  app.add_option("--out", out_path, "write output to this file");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random instance");
  int gen_n = 5;
  gen->add_option("--n", gen_n, "variable count")->capture_default_str();

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "solve an instance or program");
  std::string inst_path, variant = "zvp", program_path, params_path;
  solve_cmd->add_option("--instance", inst_path, "instance json");
  solve_cmd->add_option("--variant", variant,
                        "misocp | sdp | zvp | nn | bd");
  solve_cmd->add_option("--program", program_path,
                        "solve a raw block-conic program json instead");
  solve_cmd->add_option("--params", params_path, "solver parameter json");

  // membership
  auto* member = app.add_subcommand("membership", "GDNN cone membership");
  std::string cone_path, matrix_path, mem_variant = "zvp";
  int level = 0;
  member->add_option("--cone", cone_path, "cone spec json")->required();
  member->add_option("--matrix", matrix_path, "symmetric matrix file")
      ->required();
  member->add_option("--variant", mem_variant, "nn | zvp | bd | kzvp0 | knn");
  member->add_option("--level", level, "hierarchy level for knn")
      ->capture_default_str();

  // separate
  auto* sep = app.add_subcommand("separate", "N(K) separation oracle");
  std::string sep_cone, sep_matrix;
  double gamma = 0.0;
  sep->add_option("--cone", sep_cone, "cone spec json")->required();
  sep->add_option("--matrix", sep_matrix, "symmetric matrix file")->required();
  sep->add_option("--gamma", gamma, "shift")->capture_default_str();

  // fig1
  auto* fig1 = app.add_subcommand("fig1", "conjecture experiment");
  int fig1_count = 1000;
  fig1->add_option("--count", fig1_count, "accepted samples")
      ->capture_default_str();

  // tables
  auto* tables = app.add_subcommand("tables", "relaxation comparison sweep");
  std::vector<int> n_list = {5, 10};
  int seeds_per_n = 5;
  std::vector<std::string> tvariants = {"misocp", "nn", "zvp", "bd", "sdp"};
  int nn_cap = 5, other_cap = 30;
  std::string csv_path;
  tables->add_option("--n-list", n_list, "instance sizes");
  tables->add_option("--seeds", seeds_per_n, "instances per size")
      ->capture_default_str();
  tables->add_option("--variants", tvariants, "variants to run");
  tables->add_option("--nn-cap", nn_cap, "largest n for the nn variant")
      ->capture_default_str();
  tables->add_option("--cap", other_cap, "largest n for zvp/bd/sdp")
      ->capture_default_str();
  tables->add_option("--csv", csv_path, "also write a csv table here");

  // m44
  auto* m44 = app.add_subcommand("m44", "tied-Wishart moment-vector sampler");
  int m44_count = 1;
  m44->add_option("--count", m44_count,
                  "draws to attempt (reports acceptance rate)")
      ->capture_default_str();

  for (auto* sc : app.get_subcommands({})) sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) {
      gdnn::MisocpInstance inst = gdnn::generate_instance(gen_n, seed);
      emit(gdnn::instance_to_json(inst), out_path);
      return kExitOk;
    }

    if (*solve_cmd) {
      gdnn::SolverOptions sopts;
      gdnn::ExchangeParams xparams;
      if (!params_path.empty()) {
        auto j = nlohmann::json::parse(gdnn::read_file(params_path));
        sopts.gap_tol = j.value("gap_tol", sopts.gap_tol);
        sopts.feas_tol = j.value("feas_tol", sopts.feas_tol);
        sopts.max_iter = j.value("max_iter", sopts.max_iter);
        sopts.verbose = j.value("verbose", sopts.verbose);
        xparams.tau = j.value("tau", xparams.tau);
        xparams.dual_prune = j.value("dual_prune", xparams.dual_prune);
        xparams.fixed_soc_samples =
            j.value("fixed_soc_samples", xparams.fixed_soc_samples);
        xparams.solver = sopts;
      }
      if (!program_path.empty()) {
        gdnn::BlockConicProgram prog = gdnn::load_program(program_path);
        gdnn::Solution sol = gdnn::solve(prog, sopts);
        emit(gdnn::solution_to_json(sol), out_path);
        return sol.usable(1e-6) ? kExitOk : kExitSolverFailure;
      }
      if (inst_path.empty()) {
        std::cerr << "solve needs --instance or --program" << std::endl;
        return kExitUsage;
      }
      gdnn::MisocpInstance inst = gdnn::load_instance(inst_path);
      const double t0 =
          std::chrono::duration<double>(
              std::chrono::steady_clock::now().time_since_epoch())
              .count();
      double value = 0.0;
      std::string status;
      std::string trace_json;
      if (variant == "misocp") {
        gdnn::BruteForceResult r = gdnn::misocp_bruteforce(inst);
        value = r.value;
        status = r.failed_branches == 0 ? "optimal" : "partial";
      } else if (variant == "bd") {
        gdnn::GcppProblem g = gdnn::burer_reformulate(inst);
        gdnn::CounterRng rng(seed ^ inst.seed);
        gdnn::ExchangeResult r = gdnn::solve_bd_exchange(g, xparams, rng);
        value = r.value;
        status = gdnn::to_string(r.status);
        trace_json = gdnn::exchange_result_to_json(r);
      } else {
        gdnn::GcppProblem g = gdnn::burer_reformulate(inst);
        gdnn::RelaxationBuild b = gdnn::build_relaxation(
            g, gdnn::relaxation_variant_from_string(variant));
        gdnn::Solution sol = gdnn::solve(b.program, sopts);
        value = sol.primal_obj;
        status = sol.usable(1e-6) ? "optimal" : gdnn::to_string(sol.status);
      }
      const double t1 =
          std::chrono::duration<double>(
              std::chrono::steady_clock::now().time_since_epoch())
              .count();
      std::string j = "{\n  \"variant\": \"" + variant + "\",\n  \"value\": " +
                      std::to_string(value) + ",\n  \"status\": \"" + status +
                      "\",\n  \"time\": " + std::to_string(t1 - t0);
      if (!trace_json.empty()) j += ",\n  \"trace\": " + trace_json;
      j += "\n}";
      emit(j, out_path);
      return (status == "optimal" || status == "near_optimal")
                 ? kExitOk
                 : kExitSolverFailure;
    }

    if (*member) {
      gdnn::ConeSpec spec = gdnn::load_cone_spec(cone_path);
      Eigen::MatrixXd X = gdnn::load_matrix(matrix_path);
      gdnn::MembershipResult r;
      if (mem_variant == "zvp")
        r = gdnn::zvp_membership(spec, X, tol);
      else if (mem_variant == "nn")
        r = gdnn::nn_membership(spec, X, tol);
      else if (mem_variant == "bd")
        r = gdnn::bd_membership(spec, X, tol);
      else if (mem_variant == "kzvp0")
        r = gdnn::kzvp0_membership(spec, X, tol);
      else if (mem_variant == "knn")
        r = gdnn::knn_membership(spec, X, level, tol);
      else {
        std::cerr << "unknown membership variant: " << mem_variant
                  << std::endl;
        return kExitUsage;
      }
      emit(gdnn::membership_to_json(r, mem_variant), out_path);
      if (r.solver_failure) return kExitSolverFailure;
      return r.member ? kExitOk : kExitNonMember;
    }

    if (*sep) {
      gdnn::ConeSpec spec = gdnn::load_cone_spec(sep_cone);
      Eigen::MatrixXd X = gdnn::load_matrix(sep_matrix);
      gdnn::SeparationOutcome outcome = gdnn::separate(spec, X, gamma);
      emit(gdnn::separation_to_json(outcome), out_path);
      return kExitOk;
    }

    if (*fig1) {
      gdnn::Fig1Report rep = gdnn::run_fig1(fig1_count, seed, workers);
      emit(gdnn::fig1_report_to_json(rep), out_path);
      return kExitOk;
    }

    if (*tables) {
      gdnn::TableOptions topts;
      topts.n_list = n_list;
      topts.seeds_per_n = seeds_per_n;
      topts.variants = tvariants;
      topts.nn_cap = nn_cap;
      topts.other_cap = other_cap;
      topts.workers = workers;
      gdnn::TableReport rep = gdnn::run_tables(topts, seed);
      if (!csv_path.empty()) gdnn::write_file(csv_path, table_report_csv(rep));
      emit(gdnn::table_report_to_json(rep), out_path);
      return kExitOk;
    }

    if (*m44) {
      int accepted = 0;
      std::string last;
      for (int k = 0; k < m44_count; ++k) {
        gdnn::M44Sample s = gdnn::m44_indexed_draw(seed, k);
        if (s.accepted) {
          ++accepted;
          last = gdnn::moment_vector_to_json(s.y);
        }
      }
      if (m44_count == 1 && accepted == 1) {
        emit(last, out_path);
      } else {
        std::string j = "{\n  \"attempts\": " + std::to_string(m44_count) +
                        ",\n  \"accepted\": " + std::to_string(accepted) +
                        ",\n  \"acceptance_rate\": " +
                        std::to_string(static_cast<double>(accepted) /
                                       m44_count);
        if (!last.empty()) j += ",\n  \"last_accepted\": " + last;
        j += "\n}";
        emit(j, out_path);
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitSolverFailure;
  }
  return kExitUsage;
}
