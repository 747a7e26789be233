#include <iostream>

#include "CLI11.hpp"
#include "ergodic/commands.hpp"

int main(int argc, char** argv) {
  using namespace ergodic;
  CLI::App app{"Build, run and verify single-cycle T-function generators"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "emit a keystream");
  g->add_option("config,--config", gen.config, "config file (JSON)")->required();
  g->add_option("--count", gen.count, "number of output vectors")->required();
  g->add_option("--format", gen.format, "bin or hex")->check(CLI::IsMember({"bin", "hex"}));
  g->add_option("--out", gen.out, "output path (default stdout)");

  VerifyOptions verify;
  auto* v = app.add_subcommand("verify", "run the verification suite for a config");
  v->add_option("config,--config", verify.config, "config file (JSON)")->required();
  v->add_option("--max-width", verify.max_width, "oracle width bound k");

  BenchOptions bench;
  auto* b = app.add_subcommand("bench", "measure throughput against the univariate baseline");
  b->add_option("config,--config", bench.config, "config file (JSON)")->required();
  b->add_option("--seconds", bench.seconds, "measurement time per generator");

  AnfOptions anf;
  auto* a = app.add_subcommand("anf", "print the ANF of each output bit of an expression");
  a->add_option("--expr", anf.expr, "expression in x")->required();
  a->add_option("--bits", anf.bits, "number of low bits");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*g) {
    std::ios::sync_with_stdio(false);
    return run_gen(gen, std::cout, std::cerr);
  }
  if (*v) return run_verify(verify, std::cout, std::cerr);
  if (*b) return run_bench(bench, std::cout, std::cerr);
  return run_anf(anf, std::cout, std::cerr);
}
