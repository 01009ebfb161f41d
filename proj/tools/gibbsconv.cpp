// Command-line front end: one subcommand per scenario plus verify-all.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gibbsconv/scenarios.hpp"
#include "gibbsconv/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerification = 4;

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return kExitOk;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot write " << out_path << '\n';
    return kExitUsage;
  }
  f << text;
  return kExitOk;
}

std::string verify_all_text(bool json, bool& all_pass) {
  using namespace gibbsconv;
  all_pass = true;
  ojson arr = ojson::array();
  std::ostringstream os;
  for (const auto& fn : all_criteria()) {
    const CriterionResult r = fn();
    all_pass = all_pass && r.pass;
    if (json) {
      arr.push_back(ojson{{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"details", r.details}});
    } else {
      os << format_criterion(r) << '\n';
    }
  }
  if (json) {
    ojson out{{"scenario", "verify-all"}, {"criteria", std::move(arr)}, {"passed", all_pass}};
    return out.dump(2) + "\n";
  }
  os << (all_pass ? "verify-all: all criteria passed\n" : "verify-all: some criteria FAILED\n");
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace gibbsconv;
  CLI::App app{"Gibbs measures of the doubling map, their convolutions and entropies"};
  app.require_subcommand(1);

  Config cfg;
  std::string out_path;
  std::string format = "json";

  auto common = [&](CLI::App* sub) {
    sub->add_option("--grid", cfg.grid, "log2 of the Jacobian grid size")->capture_default_str();
    sub->add_option("--level", cfg.level, "atom level n (2^n atoms)")->capture_default_str();
    sub->add_option("--tol", cfg.tol, "eigen-solver tolerance")->capture_default_str();
    sub->add_option("--fd-step", cfg.fd_step, "finite-difference step")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub->add_option("--out", out_path, "write output to this file instead of stdout");
    sub->add_option("--format", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
  };
  auto two_specs = [&](CLI::App* sub) {
    sub->add_option("--j1", cfg.j1, "first potential spec")->capture_default_str();
    sub->add_option("--j2", cfg.j2, "second potential spec")->capture_default_str();
  };

  CLI::App* entropy = app.add_subcommand("entropy", "entropy of one Gibbs measure");
  common(entropy);
  entropy->add_option("--spec,--j1", cfg.j1, "potential spec")->capture_default_str();

  CLI::App* convolve = app.add_subcommand("convolve", "entropy of a convolution of two measures");
  common(convolve);
  two_specs(convolve);
  convolve->add_option("--mu2", cfg.mu2, "replace mu2 by periodic_third, lebesgue or dirac");

  CLI::App* periodic = app.add_subcommand("periodic", "convolution with the period-two orbit");
  common(periodic);
  periodic->add_option("--spec,--j1", cfg.j1, "bernoulli or third_symmetric spec")->capture_default_str();
  periodic->add_option("--p", cfg.p, "override the bernoulli parameter");
  periodic->add_option("--r", cfg.r, "change of coordinates (only 1 is supported)")->capture_default_str();

  CLI::App* iterate = app.add_subcommand("iterate", "iterated self-convolution");
  common(iterate);
  iterate->add_option("--spec,--j1", cfg.j1, "potential spec")->capture_default_str();
  iterate->add_option("--k-max", cfg.k_max, "number of convolutions")->capture_default_str();

  CLI::App* variational = app.add_subcommand("variational", "numerical infimum of the entropy functional");
  common(variational);
  variational->add_option("--spec,--j1", cfg.j1, "potential spec")->capture_default_str();
  variational->add_option("--steps", cfg.steps, "descent steps")->capture_default_str();
  variational->add_option("--rate", cfg.rate, "initial step size")->capture_default_str();
  variational->add_option("--v0", cfg.v0, "ones or random")->capture_default_str();
  variational->add_option("--audit", cfg.audit, "number of random lower-bound probes")->capture_default_str();

  CLI::App* derivative = app.add_subcommand("derivative", "derivative of convolution entropy");
  common(derivative);
  two_specs(derivative);
  derivative->add_option("--direction", cfg.direction, "cos:k, sin:k (k <= 4) or const")
      ->capture_default_str();

  CLI::App* appendix = app.add_subcommand("appendix", "entropy along the affine path J1 -> J2");
  common(appendix);
  two_specs(appendix);
  appendix->add_option("--t-steps", cfg.t_steps, "points in the t sweep")->capture_default_str();

  CLI::App* verify = app.add_subcommand("verify-all", "run every acceptance check");
  common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (verify->parsed()) {
      bool all_pass = true;
      const std::string text = verify_all_text(format == "json", all_pass);
      const int rc = emit(text, out_path);
      if (rc != kExitOk) return rc;
      return all_pass ? kExitOk : kExitVerification;
    }
    ScenarioResult res;
    if (entropy->parsed()) res = cmd_entropy(cfg);
    else if (convolve->parsed()) res = cmd_convolve(cfg);
    else if (periodic->parsed()) res = cmd_periodic(cfg);
    else if (iterate->parsed()) res = cmd_iterate(cfg);
    else if (variational->parsed()) res = cmd_variational(cfg);
    else if (derivative->parsed()) res = cmd_derivative(cfg);
    else res = cmd_appendix(cfg);
    const std::string text = format == "json" ? res.to_json().dump(2) + "\n" : res.to_csv();
    const int rc = emit(text, out_path);
    if (rc != kExitOk) return rc;
    if (!res.ok()) {
      for (const auto& [name, pass] : res.checks) {
        if (!pass) std::cerr << "check failed: " << name << '\n';
      }
      return kExitVerification;
    }
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kExitVerification;
  } catch (const ConvergenceError& e) {
    std::cerr << "numerical error: " << e.what() << " (last residual " << e.last_residual() << ")\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::bad_alloc&) {
    std::cerr << "numerical error: out of memory\n";
    return kExitNumerical;
  }
}
