#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ergodic/commands.hpp"
#include "ergodic/config.hpp"

using namespace ergodic;
namespace fs = std::filesystem;

namespace {

const char* kPlain22 = R"({"m": 2, "n": 2, "H": {"construction": "conjugate", "h": {"ergodic": "0"}},
                           "pi": "rotate_up", "seed": [0, 0]})";

const char* kKlimovShamir = R"({"m": 2, "n": 4, "H": {"construction": "klimov_shamir", "h": "x+1"}})";

const char* kCounter = R"({"m": 2, "n": 3, "pi": "reverse",
  "counter": {"M": 3, "c": [[1, 0], [3, 0], [0, 0]], "transition_seeds": [11, 12, 13], "output_seeds": [21, 22, 23]}})";

const char* kOddSum = R"({"m": 2, "n": 3,
  "counter": {"M": 3, "c": [[1, 0], [0, 0], [0, 0]], "transition_seeds": [1, 2, 3]}})";

const char* kSabotaged = R"({"m": 2, "n": 3, "H": {"construction": "multivariate", "combine": "xor",
  "f": [[{"ergodic": "x*x"}, "x+2"], [{"ergodic": "0"}, {"ergodic": "x"}]]}})";

const char* kMixed = R"({"m": 3, "n": 12, "H": {"construction": "multivariate", "combine": "plus",
  "f": [[{"ergodic": "x*x"}, {"ergodic": "0"}, {"ergodic": "x|1"}],
        [{"ergodic": "0"}, {"ergodic": "x^3"}, {"ergodic": "0"}],
        [{"ergodic": "x"}, {"ergodic": "0"}, {"ergodic": "x*x*x"}]],
  "g": [[], [{"measure_preserving": "x", "d": 5}], ["x + 2*x*x", {"measure_preserving": "0"}]],
  "even": [null, 2, "x << 1"]},
  "F": {"construction": "wreath_lift", "base_n": 2, "table_seed": 9,
        "inner": {"construction": "conjugate", "h": {"ergodic": "x*x"}}},
  "pi": [5, 1, 2, 3, 4, 11, 6, 7, 8, 9, 10, 0], "seed": ["0xabc", 17, "4095"]})";

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ergo_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << content;
    return p.string();
  }

  struct Result {
    int code;
    std::string out, err;
  };

  Result gen(const std::string& cfg, std::uint64_t count, const std::string& format) {
    std::ostringstream out, err;
    const int code = run_gen({file("cfg.json", cfg), count, format, ""}, out, err);
    return {code, out.str(), err.str()};
  }

  Result verify(const std::string& cfg, unsigned k = 8) {
    std::ostringstream out, err;
    const int code = run_verify({file("cfg.json", cfg), k}, out, err);
    return {code, out.str(), err.str()};
  }

  fs::path dir_;
};

int exit_status(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_F(Cli, GenHexExample) {
  const Result r = gen(kPlain22, 1, "hex");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1 0\n");
  const Result zero = gen(kPlain22, 0, "bin");
  EXPECT_EQ(zero.code, 0);
  EXPECT_TRUE(zero.out.empty());
  EXPECT_EQ(gen(kPlain22, 1, "bin").out, std::string("\x01\x00", 2));
}

TEST_F(Cli, GenRejectsOddCounterSum) {
  const Result r = gen(kOddSum, 4, "hex");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("even"), std::string::npos) << r.err;
}

TEST_F(Cli, GenIoErrors) {
  std::ostringstream out, err;
  EXPECT_EQ(run_gen({(dir_ / "missing.json").string(), 1, "hex", ""}, out, err), 2);
  EXPECT_EQ(run_gen({file("cfg.json", kPlain22), 1, "hex", (dir_ / "no/such/dir/out").string()}, out, err), 2);
  EXPECT_EQ(run_gen({file("cfg.json", "{\"m\": 2,"), 1, "hex", ""}, out, err), 1);
  EXPECT_EQ(run_gen({file("cfg.json", kPlain22), 1, "text", ""}, out, err), 1);
}

TEST_F(Cli, HexAndBinEncodeTheSameSequence) {
  for (const char* cfg : {kPlain22, kMixed, kCounter}) {
    const Config c = Config::parse(cfg);
    const Result hex = gen(cfg, 300, "hex");
    const Result bin = gen(cfg, 300, "bin");
    ASSERT_EQ(hex.code, 0) << hex.err;
    ASSERT_EQ(bin.code, 0) << bin.err;
    const std::vector<std::uint8_t> bytes(bin.out.begin(), bin.out.end());
    const auto decoded = decode_keystream(bytes, c.m, c.n);
    ASSERT_EQ(decoded.size(), 300U);
    std::istringstream lines(hex.out);
    std::string line;
    for (const auto& v : decoded) {
      ASSERT_TRUE(std::getline(lines, line));
      std::istringstream words(line);
      std::string w;
      for (unsigned j = 0; j < c.m; ++j) {
        ASSERT_TRUE(words >> w);
        ASSERT_EQ(WordN::parse("0x" + w, c.n), v[j]);
        ASSERT_EQ(w, v[j].to_hex());
      }
    }
  }
}

TEST_F(Cli, GenWritesToFile) {
  std::ostringstream out, err;
  const std::string path = (dir_ / "stream.bin").string();
  ASSERT_EQ(run_gen({file("cfg.json", kPlain22), 32, "bin", path}, out, err), 0);
  EXPECT_TRUE(out.str().empty());
  EXPECT_EQ(fs::file_size(path), 64U);
}

TEST_F(Cli, VerifyKlimovShamirPasses) {
  const Result r = verify(kKlimovShamir);
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(r.out.find("PASS single-cycle[H]"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("PASS generator[occurrence]"), std::string::npos) << r.out;
}

TEST_F(Cli, VerifyReportsSabotagedSlot) {
  const Result r = verify(kSabotaged);
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("FAIL phi_0[H.f[0][1]]"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("witness=0x"), std::string::npos);
}

TEST_F(Cli, VerifyCounterExample) {
  const Result r = verify(kCounter);
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS counter[state]: period = 192"), std::string::npos) << r.out;
}

TEST_F(Cli, VerifyExitCodeTracksFailLines) {
  for (const char* cfg : {kPlain22, kKlimovShamir, kSabotaged, kCounter, kMixed}) {
    const Result r = verify(cfg, 6);
    ASSERT_TRUE(r.code == 0 || r.code == 3) << r.err;
    EXPECT_EQ(r.code == 0, r.out.find("FAIL") == std::string::npos) << cfg;
  }
  EXPECT_EQ(verify(kPlain22, 0).code, 1);
  EXPECT_EQ(verify(kPlain22, 21).code, 1);
}

TEST_F(Cli, Bench) {
  std::ostringstream out, err;
  EXPECT_EQ(run_bench({file("cfg.json", kKlimovShamir), 0}, out, err), 1);
  ASSERT_EQ(run_bench({file("cfg.json", kKlimovShamir), 0.05}, out, err), 0);
  std::istringstream lines(out.str());
  std::string line;
  int reported = 0;
  while (std::getline(lines, line)) {
    const auto colon = line.rfind(": ");
    ASSERT_NE(colon, std::string::npos);
    EXPECT_GT(std::stod(line.substr(colon + 2)), 0.0) << line;
    ++reported;
  }
  EXPECT_EQ(reported, 2);
}

TEST_F(Cli, AnfExamples) {
  auto anf_of = [](const std::string& expr, unsigned bits) {
    std::ostringstream out, err;
    EXPECT_EQ(run_anf({expr, bits}, out, err), 0) << err.str();
    return out.str();
  };
  EXPECT_EQ(anf_of("x+1", 3), "t_0 = x_0 + 1\nt_1 = x_1 + x_0\nt_2 = x_2 + x_0*x_1\n");
  EXPECT_EQ(anf_of("x", 3), "t_0 = x_0 + 0\nt_1 = x_1 + 0\nt_2 = x_2 + 0\n");
  std::istringstream lines(anf_of("3 + 5*x", 4));
  std::string line;
  const std::string full[] = {"1", "x_0", "x_0*x_1", "x_0*x_1*x_2"};
  for (unsigned i = 0; i < 4; ++i) {
    ASSERT_TRUE(std::getline(lines, line));
    EXPECT_EQ(line.rfind("t_" + std::to_string(i) + " = x_" + std::to_string(i) + " + ", 0), 0U) << line;
    if (i == 0) {
      EXPECT_EQ(line, "t_0 = x_0 + 1");
    } else {
      const std::string tail = line.substr(line.find(" + ") + 3);
      std::istringstream terms(tail);
      bool found = false;
      for (std::string term; terms >> term;) found = found || term == full[i];
      EXPECT_TRUE(found) << line;
    }
  }
  std::ostringstream out, err;
  EXPECT_EQ(run_anf({"x >> 1", 3}, out, err), 1);
  EXPECT_NE(err.str().find("compatible"), std::string::npos);
  EXPECT_EQ(run_anf({"x", 17}, out, err), 1);
}

TEST(Config, RoundTrip) {
  for (const char* text : {kPlain22, kKlimovShamir, kCounter, kOddSum, kSabotaged, kMixed}) {
    const Config a = Config::parse(text);
    const std::string emitted = a.emit();
    const Config b = Config::parse(emitted);
    EXPECT_EQ(a, b) << text;
    EXPECT_EQ(b.emit(), emitted);
  }
  const Config c = Config::parse(kMixed);
  EXPECT_EQ(c.seed[0], WordN(12, 0xabc));
  EXPECT_EQ(c.seed[2], WordN(12, 4095));
}

TEST(Config, Diagnostics) {
  auto message = [](const std::string& text) {
    try {
      Config::parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message(R"({"m": 2})").find("missing \"n\""), std::string::npos);
  EXPECT_NE(message(R"({"m": 2, "n": 2, "H": {"construction": "conjugate", "h": "x+1"}, "colour": 1})")
                .find("config: unknown key \"colour\""),
            std::string::npos);
  EXPECT_NE(message(R"({"m": 2, "n": 2, "H": {"construction": "conjugate", "h": "x >> 1"}})")
                .find("config.H.h: expression error at position 2"),
            std::string::npos);
  EXPECT_NE(message(R"({"m": 2, "n": 2, "H": {"construction": "multivariate", "f": [["x"]]}})").find("config.H.f"),
            std::string::npos);
  EXPECT_NE(message("{\"m\": 2,\n \"n\": }").find("line 2"), std::string::npos);
  EXPECT_NE(message(R"({"m": 2, "n": 2, "seed": [1, 2, 3], "H": {"construction": "conjugate", "h": "x+1"}})")
                .find("config.seed"),
            std::string::npos);
}

TEST(Config, BuildsWhatItDescribes) {
  const Config c = Config::parse(kPlain22);
  BuiltConfig built = build(c);
  EXPECT_EQ(built.generator->next(), StateVector::from_values(2, {1, 0}));
  EXPECT_EQ(built.univariates.size(), 1U);
  EXPECT_EQ(built.univariates[0].first, "H.h");
  const BuiltConfig mixed = build(Config::parse(kMixed));
  EXPECT_EQ(mixed.transitions[0].construction(), Construction::wp_mult_plus);
  EXPECT_EQ(mixed.outputs[0].construction(), Construction::wreath_lift);
  EXPECT_THROW(build(Config::parse(kMixed), 6), ConfigError);
}

TEST_F(Cli, BinaryEntryPoint) {
  const std::string bin = ERGO_BINARY;
  const std::string cfg = file("cfg.json", kPlain22);
  const std::string out = (dir_ / "out.txt").string();
  EXPECT_EQ(exit_status(bin + " gen " + cfg + " --count 2 --format hex --out " + out), 0);
  std::ifstream in(out);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), "1 0\n1 1\n");
  EXPECT_EQ(exit_status(bin + " gen --config " + file("odd.json", kOddSum) + " --count 1 2>/dev/null"), 1);
  EXPECT_EQ(exit_status(bin + " bench " + cfg + " --seconds 0 2>/dev/null"), 1);
  EXPECT_EQ(exit_status(bin + " verify " + file("bad.json", kSabotaged) + " > /dev/null"), 3);
  EXPECT_EQ(exit_status(bin + " anf --expr 'x+1' --bits 2 > /dev/null"), 0);
  EXPECT_EQ(exit_status(bin + " frobnicate 2>/dev/null"), 1);
}
