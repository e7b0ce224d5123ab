// Command-line front end: patch enumeration, choice-type matrices,
// rationalizability testing, counterfactual bounds, binary menus, and
// synthetic data generation.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rumtest/conetest.hpp"
#include "rumtest/counterfactual.hpp"
#include "rumtest/enumerate.hpp"
#include "rumtest/errors.hpp"
#include "rumtest/estimate.hpp"
#include "rumtest/hrep.hpp"
#include "rumtest/io.hpp"
#include "rumtest/simulate.hpp"

namespace {

using namespace rumtest;

Axiom parse_axiom(const std::string& s) {
  if (s == "sarp") return Axiom::Sarp;
  if (s == "garp") return Axiom::Garp;
  throw ValidationError("unknown axiom: " + s);
}

std::int64_t brute_cap() {
  if (const char* env = std::getenv("RUMTEST_BRUTE_CAP")) {
    return std::atoll(env);
  }
  return 10'000'000;
}

RationalMatrix run_algorithm(const std::string& algo, const PatchTable& t,
                             const BudgetSystem& b, Axiom ax, bool verify) {
  if (algo == "brute") return brute_force_A(t, ax, brute_cap());
  if (algo == "crawl") return crawl_A(t, ax);
  if (algo == "decompose") return decompose_A(t, b, ax);
  if (algo == "all") {
    RationalMatrix bf = brute_force_A(t, ax, brute_cap());
    RationalMatrix cr = crawl_A(t, ax);
    RationalMatrix de = decompose_A(t, b, ax);
    if (bf.columns != cr.columns || cr.columns != de.columns) {
      throw InternalError("algorithms disagree on the column set");
    }
    if (verify) std::cout << "verified: all algorithms agree\n";
    return cr;
  }
  throw ValidationError("unknown algorithm: " + algo);
}

Eigen::VectorXd load_vector(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path);
  std::vector<double> vals;
  std::string tok;
  while (f >> tok) {
    try {
      vals.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw DataError("not a number in " + path + ": '" + tok + "'");
    }
  }
  return Eigen::Map<Eigen::VectorXd>(vals.data(),
                                     static_cast<int>(vals.size()));
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream f(out_path);
    if (!f) throw DataError("cannot write " + out_path);
    f << text << "\n";
  }
}

struct CommonOpts {
  std::string prices;
  bool keep_intersections = false;
  std::string axiom = "sarp";
};

int run(int argc, char** argv) {
  CLI::App app{"stochastic rationalizability testing for demand data"};
  app.require_subcommand(1);

  // patches
  auto* patches_cmd = app.add_subcommand("patches", "enumerate budget patches");
  CommonOpts po;
  std::string patches_out;
  patches_cmd->add_option("--prices", po.prices, "prices CSV")->required();
  patches_cmd->add_flag("--keep-intersections", po.keep_intersections);
  patches_cmd->add_option("--out", patches_out, "patch table CSV");

  // enumerate
  auto* enum_cmd = app.add_subcommand("enumerate", "build the choice-type matrix");
  CommonOpts eo;
  std::string enum_algo = "crawl", enum_out;
  bool enum_verify = false;
  enum_cmd->add_option("--prices", eo.prices)->required();
  enum_cmd->add_flag("--keep-intersections", eo.keep_intersections);
  enum_cmd->add_option("--axiom", eo.axiom)->check(CLI::IsMember({"sarp", "garp"}));
  enum_cmd->add_option("--algorithm", enum_algo)
      ->check(CLI::IsMember({"brute", "crawl", "decompose", "all"}));
  enum_cmd->add_flag("--verify", enum_verify);
  enum_cmd->add_option("--out", enum_out, "matrix file");

  // test
  auto* test_cmd = app.add_subcommand("test", "rationalizability test");
  CommonOpts to;
  std::string test_data, test_estimator = "freq", test_tau = "bic";
  std::string test_omega, test_out, test_amatrix;
  int test_reps = 999, test_threads = 1, test_basis = 3, test_fs = 3;
  double test_alpha = 0.05;
  std::uint64_t test_seed = 1;
  std::vector<double> test_target_w;
  bool test_boot_dump = false;
  test_cmd->add_option("--prices", to.prices)->required();
  test_cmd->add_option("--data", test_data, "microdata CSV")->required();
  test_cmd->add_flag("--keep-intersections", to.keep_intersections);
  test_cmd->add_option("--axiom", to.axiom)->check(CLI::IsMember({"sarp", "garp"}));
  test_cmd->add_option("--estimator", test_estimator)
      ->check(CLI::IsMember({"freq", "series", "cf"}));
  test_cmd->add_option("--basis-order", test_basis);
  test_cmd->add_option("--first-stage-order", test_fs);
  test_cmd->add_option("--target-w", test_target_w, "evaluation point per period");
  test_cmd->add_option("--tau", test_tau, "bic or a fixed value");
  test_cmd->add_option("--omega", test_omega, "identity (default) or a diagonal file");
  test_cmd->add_option("--reps", test_reps);
  test_cmd->add_option("--alpha", test_alpha);
  test_cmd->add_option("--seed", test_seed);
  test_cmd->add_option("--threads", test_threads);
  test_cmd->add_option("--a-matrix", test_amatrix, "reuse an exported matrix");
  test_cmd->add_flag("--boot-stats", test_boot_dump);
  test_cmd->add_option("--out", test_out, "report JSON path");

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "counterfactual LP bounds");
  CommonOpts bo;
  std::string bounds_pi, bounds_quantity, bounds_out;
  int bounds_target = 0;
  bool bounds_project = false;
  bounds_cmd->add_option("--prices", bo.prices)->required();
  bounds_cmd->add_flag("--keep-intersections", bo.keep_intersections);
  bounds_cmd->add_option("--axiom", bo.axiom)->check(CLI::IsMember({"sarp", "garp"}));
  bounds_cmd->add_option("--pi", bounds_pi, "stacked probabilities of the observed budgets")
      ->required();
  bounds_cmd->add_option("--target", bounds_target, "budget to bound, 1-based")
      ->required();
  bounds_cmd
      ->add_option("--quantity", bounds_quantity,
                   "patch:<i> | demand:<good> | cdf:<good>:<z> (1-based indices)")
      ->required();
  bounds_cmd->add_flag("--project", bounds_project,
                       "project infeasible probabilities onto the cone first");
  bounds_cmd->add_option("--out", bounds_out);

  // binary
  auto* bin_cmd = app.add_subcommand("binary", "binary-menu choice types");
  int bin_items = 3;
  std::vector<std::string> bin_menus;
  std::string bin_pi, bin_out;
  bin_cmd->add_option("--items", bin_items)->required();
  bin_cmd->add_option("--menus", bin_menus,
                      "pairs like 1-2 (1-based); default: all pairs");
  bin_cmd->add_option("--pi", bin_pi, "optional probabilities to test");
  bin_cmd->add_option("--out", bin_out, "matrix file");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "generate synthetic microdata");
  std::string sim_prices, sim_dgp = "mixture", sim_out, sim_nu;
  long sim_n = 1000;
  std::uint64_t sim_seed = 1;
  bool sim_endogenous = false;
  double sim_tilt = 0.4;
  sim_cmd->add_option("--prices", sim_prices)->required();
  sim_cmd->add_option("--dgp", sim_dgp)
      ->check(CLI::IsMember({"mixture", "cobb", "boundary"}));
  sim_cmd->add_option("--nu", sim_nu, "type weights file (mixture)");
  sim_cmd->add_option("--n", sim_n, "observations per budget");
  sim_cmd->add_option("--seed", sim_seed);
  sim_cmd->add_flag("--endogenous", sim_endogenous);
  sim_cmd->add_option("--tilt", sim_tilt);
  sim_cmd->add_option("--out", sim_out, "microdata CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (patches_cmd->parsed()) {
    BudgetSystem b = io::load_prices_csv(po.prices);
    PatchTable t = enumerate_patches(b, !po.keep_intersections);
    std::cout << "I=" << t.total() << "\n";
    for (int j = 0; j < t.num_budgets(); ++j) {
      std::cout << "I_" << (j + 1) << "=" << t.per_budget_counts[j] << "\n";
    }
    if (!patches_out.empty()) io::write_patches_csv(patches_out, b, t);
    return 0;
  }

  if (enum_cmd->parsed()) {
    BudgetSystem b = io::load_prices_csv(eo.prices);
    PatchTable t = enumerate_patches(b, !eo.keep_intersections);
    RationalMatrix a =
        run_algorithm(enum_algo, t, b, parse_axiom(eo.axiom), enum_verify);
    std::cout << "I=" << a.rows() << "\nH=" << a.cols() << "\n";
    if (!enum_out.empty()) io::write_a_matrix(enum_out, a);
    return 0;
  }

  if (test_cmd->parsed()) {
    if (test_reps < 99) {
      throw ValidationError("need at least 99 bootstrap replications");
    }
    if (test_reps < 999) {
      std::cerr << "warning: fewer than 999 replications gives a coarse "
                   "critical value\n";
    }
    if (!(test_alpha > 0.0 && test_alpha <= 0.5)) {
      throw ValidationError("alpha must lie in (0, 1/2]");
    }
    BudgetSystem b = io::load_prices_csv(to.prices);
    PatchTable t = enumerate_patches(b, !to.keep_intersections);
    RationalMatrix a = test_amatrix.empty()
                           ? crawl_A(t, parse_axiom(to.axiom))
                           : io::read_a_matrix(test_amatrix);
    Microdata data = io::load_microdata_csv(test_data, b, t);

    Weighting om;
    if (!test_omega.empty() && test_omega != "identity") {
      om.diag = load_vector(test_omega);
    }

    SeriesSpec spec;
    spec.order = test_basis;
    spec.first_stage_order = test_fs;
    spec.seed = test_seed;
    if (test_target_w.empty()) {
      for (int j = 0; j < data.periods(); ++j) {
        spec.target_w.push_back(
            std::accumulate(data.w[j].begin(), data.w[j].end(), 0.0) /
            data.n(j));
      }
    } else if (static_cast<int>(test_target_w.size()) == data.periods()) {
      spec.target_w = test_target_w;
    } else {
      throw ValidationError("one target log expenditure per period required");
    }

    PiVector pihat;
    Resampler draw;
    double smoothed_n = 0.0;
    if (test_estimator == "freq") {
      FreqResult fr = freq_pi(data, t);
      pihat = fr.pi;
      draw = multinomial_resampler(pihat);
      long nmin = *std::min_element(pihat.block_n.begin(), pihat.block_n.end());
      smoothed_n = static_cast<double>(nmin);
    } else {
      SeriesResult sr = test_estimator == "series" ? series_pi(data, t, spec)
                                                   : cf_pi(data, t, spec);
      pihat = sr.pi;
      draw = normal_resampler(pihat, sr.v_hat);
      smoothed_n = effective_n(sr.v_hat, pihat.block_n, pihat.block_sizes);
    }

    double tau;
    if (test_tau == "bic") {
      tau = default_tau(smoothed_n);
    } else {
      try {
        tau = std::stod(test_tau);
      } catch (const std::exception&) {
        throw ValidationError("--tau takes 'bic' or a number");
      }
      if (tau < 0.0) throw ValidationError("tau must be nonnegative");
    }

    TestResult res = bootstrap_test(pihat, a.dense(), om, tau, test_reps,
                                    test_alpha, draw, test_seed, test_threads);
    emit(io::test_report_json(res, test_estimator, test_boot_dump), test_out);
    return 0;
  }

  if (bounds_cmd->parsed()) {
    BudgetSystem b = io::load_prices_csv(bo.prices);
    PatchTable t = enumerate_patches(b, !bo.keep_intersections);
    RationalMatrix a = crawl_A(t, parse_axiom(bo.axiom));
    const int target = bounds_target - 1;
    if (target < 0 || target >= t.num_budgets()) {
      throw ValidationError("target budget out of range");
    }
    Eigen::VectorXd pi_minus = load_vector(bounds_pi);
    if (bounds_project) {
      Eigen::MatrixXd dense = a.dense();
      const int off = t.block_offset(target);
      const int it = t.per_budget_counts[target];
      Eigen::MatrixXd a_minus(dense.rows() - it, dense.cols());
      a_minus << dense.topRows(off), dense.bottomRows(dense.rows() - off - it);
      pi_minus = nnls_project(pi_minus, a_minus, Weighting{}, 0.0).eta;
    }

    auto fields = [&] {
      std::vector<std::string> out;
      std::string tok;
      std::istringstream is(bounds_quantity);
      while (std::getline(is, tok, ':')) out.push_back(tok);
      return out;
    }();
    if (fields.empty()) throw ValidationError("empty --quantity");
    BoundResult r;
    if (fields[0] == "patch" && fields.size() == 2) {
      r = bound_patch_prob(a, target, std::stoi(fields[1]) - 1, pi_minus);
    } else if ((fields[0] == "demand" && fields.size() == 2) ||
               (fields[0] == "cdf" && fields.size() == 3)) {
      const int good = std::stoi(fields[1]) - 1;
      std::vector<std::pair<double, double>> extrema;
      for (int i = 0; i < t.per_budget_counts[target]; ++i) {
        extrema.push_back(
            patch_extrema(b, t, t.patch_index(target, i), good));
      }
      r = fields[0] == "demand"
              ? bound_expected_demand(a, target, pi_minus, extrema)
              : bound_cdf(a, target, pi_minus, extrema, std::stod(fields[2]));
    } else {
      throw ValidationError("bad --quantity; use patch:<i>, demand:<k>, "
                            "or cdf:<k>:<z>");
    }
    emit(io::bounds_report_json(bounds_quantity, target, r), bounds_out);
    return 0;
  }

  if (bin_cmd->parsed()) {
    std::vector<std::pair<int, int>> menus;
    if (bin_menus.empty()) {
      for (int i = 0; i < bin_items; ++i) {
        for (int j = i + 1; j < bin_items; ++j) menus.push_back({i, j});
      }
    } else {
      for (const auto& m : bin_menus) {
        const auto dash = m.find('-');
        if (dash == std::string::npos) {
          throw ValidationError("menus look like 1-2");
        }
        menus.push_back({std::stoi(m.substr(0, dash)) - 1,
                         std::stoi(m.substr(dash + 1)) - 1});
      }
    }
    RationalMatrix a = binary_menu_A(bin_items, menus);
    std::cout << "I=" << a.rows() << "\nH=" << a.cols() << "\n";
    Eigen::MatrixXd dense = a.dense();
    for (int i = 0; i < dense.rows(); ++i) {
      for (int j = 0; j < dense.cols(); ++j) {
        std::cout << (j ? " " : "") << static_cast<int>(dense(i, j));
      }
      std::cout << "\n";
    }
    if (!bin_out.empty()) io::write_a_matrix(bin_out, a);
    if (!bin_pi.empty()) {
      Eigen::VectorXd pi = load_vector(bin_pi);
      if (pi.size() != dense.rows()) {
        throw ValidationError("pi length differs from row count");
      }
      Projection p = nnls_project(pi, dense, Weighting{}, 0.0);
      std::cout << "member=" << (cone_membership(pi, dense) ? 1 : 0)
                << "\nobjective=" << p.objective << "\n";
    }
    return 0;
  }

  if (sim_cmd->parsed()) {
    BudgetSystem b = io::load_prices_csv(sim_prices);
    PatchTable t = enumerate_patches(b, true);
    Microdata data;
    if (sim_dgp == "mixture" || sim_dgp == "boundary") {
      RationalMatrix a = crawl_A(t, Axiom::Sarp);
      Eigen::VectorXd nu;
      if (sim_dgp == "boundary") {
        if (a.cols() != 3) {
          throw ValidationError(
              "the boundary generator needs the canonical two-budget system");
        }
        nu = Eigen::VectorXd::Zero(3);
        nu(0) = nu(1) = 0.5;
      } else if (!sim_nu.empty()) {
        nu = load_vector(sim_nu);
      } else {
        nu = Eigen::VectorXd::Ones(a.cols());
      }
      data = sample_mixture(a, t, nu, std::vector<long>(b.count(), sim_n),
                            sim_seed);
    } else {
      CobbDouglasDGP dgp;
      dgp.budgets = b;
      dgp.base_share = Eigen::VectorXd::Ones(b.num_goods) / b.num_goods;
      dgp.tilt = sim_tilt;
      dgp.endogenous = sim_endogenous;
      dgp.n_per_budget = sim_n;
      dgp.seed = sim_seed;
      data = classify_bundles(cobb_douglas_population(dgp), b, t);
    }
    io::write_microdata_csv(sim_out, data);
    std::cout << "wrote " << sim_out << "\n";
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const rumtest::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
