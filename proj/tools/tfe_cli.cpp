#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "tfe/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Thin-film homotopy and branching toolkit"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  std::string config_path, out_dir;
  bool strict = false, dump = false;
  int threads = 0;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_flag("--strict", strict, "treat breaches and degeneracies as failures");
  app.add_option("--threads", threads, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
  app.add_flag("--dump-defaults", dump, "print the default config and exit");

  auto* kernel = app.add_subcommand("kernel", "tabulate the kernel and its derivatives");
  auto* spectrum = app.add_subcommand("spectrum", "Gram matrix, eigen-residuals, adjoint polynomials");
  auto* evolve = app.add_subcommand("evolve", "decay of moment-cancelled data");
  auto* branch = app.add_subcommand("branch", "branching coefficients and root analysis");
  auto* cont = app.add_subcommand("continue", "similarity profiles along the n list");
  auto* diagnose = app.add_subcommand("diagnose", "expansion diagnostic of ln|F|");
  int evolve_k = -1, branch_k = -1, cont_k = -1;
  std::string branch_kind, cont_kind;
  std::vector<double> n_list;
  evolve->add_option("--k", evolve_k, "moment order");
  branch->add_option("--k", branch_k, "eigenvalue index");
  branch->add_option("--kind", branch_kind, "global or blowup");
  cont->add_option("--k", cont_k, "eigenvalue index");
  cont->add_option("--kind", cont_kind, "global or blowup");
  cont->add_option("--n", n_list, "n values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }
  try {
    if (dump) {
      std::cout << tfe::config_to_json(tfe::default_config(1)).dump(2) << "\n";
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return 3;
    }
    tfe::RunConfig cfg = config_path.empty() ? tfe::default_config(1) : tfe::load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (evolve_k >= 0) cfg.evolve.k = evolve_k;
    if (branch_k >= 0) cfg.branch.k = branch_k;
    if (!branch_kind.empty()) cfg.branch.kind = branch_kind;
    if (cont_k >= 0) cfg.cont.k = cont_k;
    if (!cont_kind.empty()) cfg.cont.kind = cont_kind;
    if (!n_list.empty()) cfg.n_list = n_list;
    tfe::validate(cfg);
    tfe::set_threads(threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency()));

    if (*kernel) tfe::cmd_kernel(cfg, std::cout);
    if (*spectrum) tfe::cmd_spectrum(cfg, strict, std::cout);
    if (*evolve) tfe::cmd_evolve(cfg, std::cout);
    if (*branch) tfe::cmd_branch(cfg, strict, std::cout);
    if (*cont) tfe::cmd_continue(cfg, std::cout);
    if (*diagnose) tfe::cmd_diagnose(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tfe::exit_code(e);
  }
  return 0;
}
