#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace ergodic {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitIo = 2, kExitVerifyFailed = 3 };

struct GenOptions {
  std::string config;
  std::uint64_t count = 0;
  std::string format = "bin";  // bin | hex
  std::string out;             // empty or "-" for stdout
};

struct VerifyOptions {
  std::string config;
  unsigned max_width = 8;
};

struct BenchOptions {
  std::string config;
  double seconds = 1.0;
};

struct AnfOptions {
  std::string expr;
  unsigned bits = 4;
};

int run_gen(const GenOptions& opt, std::ostream& out, std::ostream& err);
int run_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err);
int run_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err);
int run_anf(const AnfOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace ergodic
