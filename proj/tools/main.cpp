#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "cli.hpp"
#include "sidecomp/errors.hpp"

int main(int argc, char** argv) {
  using namespace sidecomp;
  CLI::App app{"Strongly irreducible decompositions and similarity invariants of commuting matrix tuples"};
  app.require_subcommand(1, 1);

  cli::JobConfig config;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string format = "json";

  auto common = [&](CLI::App* sub, bool two_inputs) {
    sub->add_option("--input", config.input, "Input JSON file");
    if (two_inputs) sub->add_option("--input2", config.input2, "Second tuple file");
    sub->add_option("--seed", seed, "Seed (falls back to SIDECOMP_SEED)");
    sub->add_option("--tol", tol, "commute/idempotent/kernel/invertibility tolerance")->check(CLI::PositiveNumber);
    sub->add_flag("--witness", config.witness, "Emit and verify explicit witnesses");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "table"}));
  };
  auto* decompose = app.add_subcommand("decompose", "Unit strongly irreducible decomposition of a tuple");
  common(decompose, false);
  auto* invariant = app.add_subcommand("invariant", "Similarity invariant (k; n_1, ..., n_k) and K_0 data");
  common(invariant, false);
  auto* sim = app.add_subcommand("similar", "Decide similarity of two tuples");
  common(sim, true);
  auto* rkhs = app.add_subcommand("rkhs", "Truncated function-space models and their identities");
  common(rkhs, false);
  rkhs->add_option("--emit", config.emit, "Write the truncated tuple to this file");
  auto* selftest = app.add_subcommand("selftest", "Planted-instance recovery and oracle comparison");
  common(selftest, false);
  selftest->add_option("--count", config.count, "Number of planted instances")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kInputError;
  }
  config.command = app.get_subcommands().front()->get_name();

  try {
    config.policy.seed = cli::resolve_seed(seed, std::getenv("SIDECOMP_SEED"));
  } catch (const InputError& e) {
    std::cerr << "sidecomp: " << e.what() << '\n';
    return cli::kInputError;
  }
  if (tol) {
    config.policy.commute_tol = *tol;
    config.policy.idem_tol = *tol;
    config.policy.kernel_tol = *tol;
    config.policy.inv_tol = *tol;
  }
  config.format = format == "table" ? cli::Format::table : cli::Format::json;

  const auto result = cli::run_job(config);
  if (!result.report.is_null()) std::cout << cli::render(result.report, config.format);
  if (!result.error.empty()) {
    const char* kind = result.exit_code == cli::kInputError ? "input error" : result.exit_code == cli::kDegenerate ? "numerical degeneracy" : "property violation";
    std::cerr << "sidecomp: " << kind << ": " << result.error << '\n';
  }
  return result.exit_code;
}
