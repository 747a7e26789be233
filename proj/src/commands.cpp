#include "ergodic/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "ergodic/config.hpp"
#include "ergodic/verify.hpp"

namespace ergodic {

namespace {

std::optional<Config> load_config(const std::string& path, std::ostream& err, int& code) {
  try {
    return Config::load(path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    code = kExitConfig;
  } catch (const std::runtime_error& e) {
    err << "i/o error: " << e.what() << "\n";
    code = kExitIo;
  }
  return std::nullopt;
}

std::optional<BuiltConfig> build_config(const Config& cfg, std::optional<unsigned> width, std::ostream& err) {
  try {
    return build(cfg, width);
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
  }
  return std::nullopt;
}

void write_hex(KeystreamGenerator& gen, std::uint64_t count, std::ostream& out) {
  for (std::uint64_t i = 0; i < count && out; ++i) {
    const StateVector y = gen.next();
    for (unsigned j = 0; j < y.size(); ++j) {
      if (j) out << ' ';
      out << y[j].to_hex();
    }
    out << '\n';
  }
}

std::string pow2(unsigned e) { return "2^" + std::to_string(e); }

std::vector<std::uint8_t> packed_bits(const std::vector<std::uint64_t>& seq, unsigned position) {
  std::vector<std::uint8_t> out(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) out[i] = (seq[i] >> position) & 1U;
  return out;
}

std::string period_text(std::optional<std::size_t> p) { return p ? std::to_string(*p) : "exceeds window"; }

void verify_univariates(const BuiltConfig& built, unsigned k, VerificationReport& report) {
  for (const auto& [name, U] : built.univariates) {
    const WordFn fn = [U](const WordN& x) { return U(x); };
    if (U.is_ergodic()) {
      report.append(check_ergodic_anf(fn, k, name));
      report.append(check_single_cycle(fn, k, CycleOptions{true}, name));
    } else if (U.is_measure_preserving()) {
      report.append(check_measure_preserving(fn, k, name));
    } else {
      const auto bad = find_incompatibility(fn, k);
      report.add({"compatible[" + name + "]", !bad, "width " + std::to_string(k),
                  bad ? std::optional<WordN>(WordN(k, bad->x)) : std::nullopt});
    }
  }
}

void verify_map(const MultivariateMap& H, const std::string& name, unsigned w, VerificationReport& report) {
  const unsigned m = H.m();
  const MultiFn fn = [H](const StateVector& x) { return H(x); };
  if (H.is_compatible_construction()) {
    report.append(check_compatible_multivariate(fn, m, w, name));
    const WordFn flat = [H, m](const WordN& X) { return interleave(H(deinterleave(X, m, X.width() / m))); };
    report.append(check_ergodic_anf(flat, m * w, name + " interleaved"));
  }
  report.append(check_single_cycle(fn, m, w, CycleOptions{true}, name));
}

void verify_generator(const Config& cfg, const BuiltConfig& built, unsigned w, VerificationReport& report) {
  const unsigned m = cfg.m;
  const unsigned bits = m * w;
  const std::uint64_t P = std::uint64_t{1} << bits;
  const std::uint64_t M = cfg.counter ? cfg.counter->M : 1;
  const std::uint64_t period = M * P;
  if (period > (std::uint64_t{1} << 22)) {
    report.add_bound("generator checks skipped, period", period);
    return;
  }
  auto gen = built.generator->clone();
  std::vector<std::uint64_t> states, outputs;
  for (std::uint64_t i = 0; i < 2 * period; ++i) {
    states.push_back(gen->state().x.pack());
    outputs.push_back(gen->next().pack());
  }
  const std::string subject = cfg.counter ? "counter" : "generator";
  const std::string shape = " at width " + std::to_string(w);
  report.add_bound("generator_width", w);

  auto period_check = [&](const std::string& name, const std::vector<std::uint64_t>& seq) {
    const auto p = least_period(std::span<const std::uint64_t>(seq));
    report.add({name, p && *p == period, "period = " + period_text(p) + shape,
                p && *p == period ? std::nullopt : std::optional<WordN>(WordN(bits, seq.front()))});
  };
  period_check(subject + "[state]", states);
  period_check(subject + "[output]", outputs);

  const Census census = occurrence_census(*built.generator, period);
  report.add({subject + "[occurrence]", census.min_count() == M && census.max_count() == M,
              "every vector occurs " + std::to_string(census.min_count()) + ".." + std::to_string(census.max_count()) +
                  " times per period, expected " + std::to_string(M),
              std::nullopt});

  for (unsigned j = 0; j < m; ++j) {
    for (unsigned s = 0; s < w; ++s) {
      const std::string coord = "[j=" + std::to_string(j) + ",s=" + std::to_string(s) + "]";
      const auto p = bit_period(packed_bits(outputs, j * w + s));
      const bool ok = cfg.counter ? p && *p % P == 0 && *p <= period : p && *p == P;
      report.add({subject + "[output-bit]" + coord, ok,
                  "period = " + period_text(p) + (cfg.counter ? ", multiple of " : ", expected ") + pow2(bits),
                  ok ? std::nullopt : std::optional<WordN>(WordN(bits, outputs.front()))});
    }
  }
  if (!cfg.counter && built.transitions.front().is_compatible_construction()) {
    for (unsigned j = 0; j < m; ++j) {
      for (unsigned s = 0; s < w; ++s) {
        const std::string coord = "[j=" + std::to_string(j) + ",s=" + std::to_string(s) + "]";
        const auto p = bit_period(packed_bits(states, j * w + s));
        const std::uint64_t expected = std::uint64_t{1} << (m * s + j + 1);
        report.add({subject + "[state-bit]" + coord, p && *p == expected,
                    "period = " + period_text(p) + ", expected " + pow2(m * s + j + 1),
                    p && *p == expected ? std::nullopt : std::optional<WordN>(WordN(bits, states.front()))});
      }
    }
  }
}

unsigned min_width(const BuiltConfig& built) {
  unsigned w = 1;
  for (const auto& H : built.transitions) w = std::max(w, H.min_width());
  for (const auto& F : built.outputs) w = std::max(w, F.min_width());
  return w;
}

struct Throughput {
  double vectors_per_second;
  double bytes_per_second;
  std::uint64_t sink;
};

Throughput measure(KeystreamGenerator& gen, double seconds) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const auto budget = std::chrono::duration<double>(seconds);
  std::uint64_t vectors = 0, sink = 0;
  do {
    for (int i = 0; i < 1024; ++i) sink ^= gen.next()[0].low64();
    vectors += 1024;
  } while (clock::now() - start < budget);
  const double elapsed = std::chrono::duration<double>(clock::now() - start).count();
  const double vps = static_cast<double>(vectors) / elapsed;
  return {vps, vps * gen.m() * ((gen.n() + 7) / 8), sink};
}

}  // namespace

int run_gen(const GenOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.format != "bin" && opt.format != "hex") {
    err << "usage error: --format must be bin or hex\n";
    return kExitConfig;
  }
  int code = kExitOk;
  const auto cfg = load_config(opt.config, err, code);
  if (!cfg) return code;
  auto built = build_config(*cfg, std::nullopt, err);
  if (!built) return kExitConfig;

  std::ofstream file;
  std::ostream* sink = &out;
  if (!opt.out.empty() && opt.out != "-") {
    file.open(opt.out, std::ios::binary | std::ios::trunc);
    if (!file) {
      err << "i/o error: cannot open " << opt.out << " for writing\n";
      return kExitIo;
    }
    sink = &file;
  }
  if (opt.format == "bin") {
    write_keystream(*built->generator, opt.count, *sink);
  } else {
    write_hex(*built->generator, opt.count, *sink);
  }
  sink->flush();
  if (!*sink) {
    err << "i/o error: write failed\n";
    return kExitIo;
  }
  return kExitOk;
}

int run_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.max_width < 1 || opt.max_width > kMaxOracleWidth) {
    err << "usage error: --max-width must be in [1, " << kMaxOracleWidth << "]\n";
    return kExitConfig;
  }
  int code = kExitOk;
  const auto cfg = load_config(opt.config, err, code);
  if (!cfg) return code;
  auto full = build_config(*cfg, std::nullopt, err);
  if (!full) return kExitConfig;

  const unsigned k = opt.max_width;
  const unsigned m = cfg->m;
  VerificationReport report("config");
  verify_univariates(*full, k, report);

  const unsigned floor = min_width(*full);
  const unsigned w = std::max(floor, std::min({k, cfg->n, kMaxOracleWidth / m}));
  if (m * w > kMaxOracleWidth || w > cfg->n) {
    report.add_bound("multivariate checks skipped, component width", w);
  } else {
    Config narrowed = *cfg;
    const bool fixed_pi = cfg->pi.kind == BitPermutation::Kind::custom && w < cfg->n;
    if (fixed_pi) narrowed.pi = PiSpec{};
    auto small = build_config(narrowed, w, err);
    if (!small) return kExitConfig;
    const bool counter = cfg->counter.has_value();
    for (std::size_t j = 0; j < small->transitions.size(); ++j)
      verify_map(small->transitions[j], counter ? "transition_" + std::to_string(j) : "H", w, report);
    for (std::size_t j = 0; j < small->outputs.size(); ++j) {
      if (!counter && !cfg->F) break;
      verify_map(small->outputs[j], counter ? "output_" + std::to_string(j) : "F", w, report);
    }
    if (fixed_pi) {
      report.add_bound("generator checks skipped, custom pi table width", cfg->n);
    } else {
      verify_generator(*cfg, *small, w, report);
    }
  }
  out << report.to_text();
  return report.passed() ? kExitOk : kExitVerifyFailed;
}

int run_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
  if (!(opt.seconds > 0) || !std::isfinite(opt.seconds)) {
    err << "usage error: --seconds must be positive\n";
    return kExitConfig;
  }
  int code = kExitOk;
  const auto cfg = load_config(opt.config, err, code);
  if (!cfg) return code;
  auto built = build_config(*cfg, std::nullopt, err);
  if (!built) return kExitConfig;
  std::unique_ptr<KeystreamGenerator> baseline;
  try {
    baseline = build_baseline(*cfg);
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  const std::string name =
      cfg->counter ? "counter-dependent M=" + std::to_string(cfg->counter->M) : to_string(built->transitions.front().construction());
  const Throughput a = measure(*built->generator, opt.seconds);
  const Throughput b = measure(*baseline, opt.seconds);
  out << std::fixed << std::setprecision(0);
  out << "generator " << name << " m=" << cfg->m << " n=" << cfg->n << ": " << a.vectors_per_second
      << " vectors/s, " << a.bytes_per_second << " bytes/s\n";
  out << "baseline conjugate univariate width " << cfg->m * cfg->n << ": " << b.vectors_per_second << " vectors/s, "
      << b.bytes_per_second << " bytes/s\n";
  err << "checksum " << std::hex << (a.sink ^ b.sink) << std::dec << "\n";
  return kExitOk;
}

int run_anf(const AnfOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.bits < 1 || opt.bits > 16) {
    err << "usage error: --bits must be in [1, 16]\n";
    return kExitConfig;
  }
  TFuncExpr e = TFuncExpr::constant(0);
  try {
    e = parse_expr(opt.expr);
  } catch (const ParseError& p) {
    err << "parse error at position " << p.position() << ": " << p.message() << "\n";
    return kExitConfig;
  }
  const unsigned k = opt.bits;
  std::vector<std::uint64_t> table(std::size_t{1} << k);
  for (std::uint64_t x = 0; x < table.size(); ++x) table[x] = e.eval(WordN(k, x)).low64();
  for (unsigned j = 0; j < k; ++j) {
    const std::size_t below = std::size_t{1} << j;
    std::vector<std::uint8_t> phi(below), alpha(below), full(2 * below);
    for (std::uint64_t x = 0; x < 2 * below; ++x) full[x] = (table[x] >> j) & 1U;
    bool triangular = true;
    for (std::uint64_t x = 0; x < below; ++x) {
      phi[x] = full[x];
      triangular = triangular && full[x + below] != full[x];
    }
    const std::string t = "t_" + std::to_string(j) + " = ";
    if (triangular) {
      out << t << "x_" << j << " + " << anf(phi).to_string() << "\n";
    } else {
      out << t << anf(full).to_string() << "\n";
    }
  }
  return kExitOk;
}

}  // namespace ergodic
