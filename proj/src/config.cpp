#include "ergodic/config.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace ergodic {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(path, "unknown key \"" + it.key() + "\"");
  }
}

const json& required(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) fail(path, std::string("missing \"") + key + "\"");
  return *it;
}

std::uint64_t read_u64(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  if (j.is_string()) {
    try {
      const WordN w = WordN::parse(j.get<std::string>(), kMaxWidth);
      if (w.fits_u64()) return w.low64();
    } catch (const std::invalid_argument&) {
    }
  }
  fail(path, "expected a non-negative integer below 2^64");
}

unsigned read_unsigned(const json& j, const std::string& path, unsigned lo, unsigned hi) {
  const std::uint64_t v = read_u64(j, path);
  if (v < lo || v > hi) fail(path, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<unsigned>(v);
}

// Decimal or 0x-hex, as a number or a string; negative numbers wrap.
WordN read_word(const json& j, unsigned width, const std::string& path) {
  if (j.is_number_unsigned()) return WordN(width, j.get<std::uint64_t>());
  if (j.is_number_integer()) {
    const std::int64_t v = j.get<std::int64_t>();
    return v < 0 ? -WordN(width, static_cast<std::uint64_t>(-(v + 1)) + 1) : WordN(width, static_cast<std::uint64_t>(v));
  }
  if (j.is_string()) {
    try {
      return WordN::parse(j.get<std::string>(), width);
    } catch (const std::invalid_argument& e) {
      fail(path, e.what());
    }
  }
  fail(path, "expected an integer (number, decimal string or 0x-hex string)");
}

ojson word_json(const WordN& w) {
  if (w.fits_u64()) return w.low64();
  return "0x" + w.to_hex();
}

TFuncExpr read_expr(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected an expression string");
  try {
    return parse_expr(j.get<std::string>());
  } catch (const ParseError& e) {
    fail(path, "expression error at position " + std::to_string(e.position()) + ": " + e.message());
  }
}

MapKind read_kind(const json& j, const std::string& path) {
  const std::string s = j.is_string() ? j.get<std::string>() : "";
  if (s == "ergodic") return MapKind::ergodic;
  if (s == "measure_preserving") return MapKind::measure_preserving;
  if (s == "unverified") return MapKind::unverified;
  fail(path, "kind must be \"ergodic\", \"measure_preserving\" or \"unverified\"");
}

UnivariateSpec read_univariate(const json& j, MapKind slot_kind, const std::string& path) {
  UnivariateSpec s;
  if (j.is_string()) {
    s.form = UnivariateSpec::Form::raw;
    s.expr = read_expr(j, path);
    s.kind = slot_kind;
    return s;
  }
  if (!j.is_object()) fail(path, "expected an expression string or an object");
  if (j.contains("ergodic")) {
    only_keys(j, path, {"ergodic"});
    s.form = UnivariateSpec::Form::ergodic;
    s.expr = read_expr(j["ergodic"], path + ".ergodic");
    s.kind = MapKind::ergodic;
  } else if (j.contains("measure_preserving")) {
    only_keys(j, path, {"measure_preserving", "d"});
    s.form = UnivariateSpec::Form::measure_preserving;
    s.expr = read_expr(j["measure_preserving"], path + ".measure_preserving");
    s.d = j.contains("d") ? read_word(j["d"], kMaxWidth, path + ".d") : WordN(kMaxWidth);
    s.kind = MapKind::measure_preserving;
  } else if (j.contains("expr")) {
    only_keys(j, path, {"expr", "kind"});
    s.form = UnivariateSpec::Form::raw;
    s.expr = read_expr(j["expr"], path + ".expr");
    s.kind = j.contains("kind") ? read_kind(j["kind"], path + ".kind") : slot_kind;
  } else {
    fail(path, "expected one of \"ergodic\", \"measure_preserving\", \"expr\"");
  }
  return s;
}

ojson emit_univariate(const UnivariateSpec& s) {
  ojson o = ojson::object();
  switch (s.form) {
    case UnivariateSpec::Form::ergodic: o["ergodic"] = print_expr(s.expr); break;
    case UnivariateSpec::Form::measure_preserving:
      o["measure_preserving"] = print_expr(s.expr);
      o["d"] = word_json(s.d);
      break;
    case UnivariateSpec::Form::raw:
      o["expr"] = print_expr(s.expr);
      o["kind"] = to_string(s.kind);
      break;
  }
  return o;
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& array_of(const json& j, std::size_t size, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  if (j.size() != size) fail(path, "expected " + std::to_string(size) + " entries, got " + std::to_string(j.size()));
  return j;
}

MapSpec read_map(const json& j, unsigned m, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  MapSpec s;
  const json& kind = required(j, "construction", path);
  const std::string name = kind.is_string() ? kind.get<std::string>() : "";
  if (name == "conjugate" || name == "klimov_shamir") {
    only_keys(j, path, {"construction", "h"});
    s.construction = name == "conjugate" ? Construction::conjugate : Construction::klimov_shamir;
    s.h = read_univariate(required(j, "h", path), MapKind::ergodic, path + ".h");
  } else if (name == "multivariate") {
    only_keys(j, path, {"construction", "combine", "f", "g", "even"});
    const std::string combine = j.contains("combine") && j["combine"].is_string() ? j["combine"].get<std::string>()
                                : j.contains("combine")                          ? "?"
                                                                                 : "xor";
    if (combine == "xor") {
      s.construction = Construction::wp_mult_xor;
    } else if (combine == "plus") {
      s.construction = Construction::wp_mult_plus;
    } else {
      fail(path + ".combine", "must be \"xor\" or \"plus\"");
    }
    const json& f = array_of(required(j, "f", path), m, path + ".f");
    for (std::size_t t = 0; t < m; ++t) {
      const json& row = array_of(f[t], m, at(path + ".f", t));
      s.f.emplace_back();
      for (std::size_t r = 0; r < m; ++r)
        s.f[t].push_back(read_univariate(row[r], MapKind::ergodic, at(at(path + ".f", t), r)));
    }
    if (j.contains("g")) {
      const json& g = array_of(j["g"], m, path + ".g");
      for (std::size_t t = 0; t < m; ++t) {
        const json& row = array_of(g[t], t, at(path + ".g", t));
        s.g.emplace_back();
        for (std::size_t r = 0; r < t; ++r)
          s.g[t].push_back(read_univariate(row[r], MapKind::measure_preserving, at(at(path + ".g", t), r)));
      }
    } else {
      UnivariateSpec identity{UnivariateSpec::Form::measure_preserving, TFuncExpr::constant(0), WordN(kMaxWidth),
                              MapKind::measure_preserving};
      for (unsigned t = 0; t < m; ++t) s.g.emplace_back(t, identity);
    }
    if (j.contains("even")) {
      const json& even = array_of(j["even"], m, path + ".even");
      bool any = false;
      for (std::size_t t = 0; t < m; ++t) {
        const std::string p = at(path + ".even", t);
        if (even[t].is_null()) {
          s.even.emplace_back();
        } else if (even[t].is_number()) {
          s.even.push_back(EvenSpec{read_word(even[t], kMaxWidth, p), std::nullopt});
        } else if (even[t].is_object()) {
          only_keys(even[t], p, {"const"});
          s.even.push_back(EvenSpec{read_word(required(even[t], "const", p), kMaxWidth, p + ".const"), std::nullopt});
        } else {
          s.even.push_back(EvenSpec{std::nullopt, read_expr(even[t], p)});
        }
        any = any || s.even.back().has_value();
      }
      if (!any) s.even.clear();
    }
  } else if (name == "wreath_lift") {
    only_keys(j, path, {"construction", "base_n", "table", "table_seed", "inner"});
    s.construction = Construction::wreath_lift;
    s.base_n = read_unsigned(required(j, "base_n", path), path + ".base_n", 1, kMaxTableBits / m);
    if (j.contains("table") == j.contains("table_seed")) fail(path, "give exactly one of \"table\" and \"table_seed\"");
    if (j.contains("table")) {
      const std::size_t size = std::size_t{1} << (m * s.base_n);
      const json& t = array_of(j["table"], size, path + ".table");
      for (std::size_t i = 0; i < size; ++i)
        s.table.push_back(static_cast<std::uint32_t>(read_unsigned(t[i], at(path + ".table", i), 0, size - 1)));
    } else {
      s.table_seed = read_u64(j["table_seed"], path + ".table_seed");
    }
    s.inner.push_back(read_map(required(j, "inner", path), m, path + ".inner"));
  } else {
    fail(path + ".construction", "must be \"conjugate\", \"klimov_shamir\", \"multivariate\" or \"wreath_lift\"");
  }
  return s;
}

ojson emit_map(const MapSpec& s) {
  ojson o = ojson::object();
  switch (s.construction) {
    case Construction::conjugate:
    case Construction::klimov_shamir:
      o["construction"] = s.construction == Construction::conjugate ? "conjugate" : "klimov_shamir";
      o["h"] = emit_univariate(*s.h);
      break;
    case Construction::wp_mult_xor:
    case Construction::wp_mult_plus: {
      o["construction"] = "multivariate";
      o["combine"] = s.construction == Construction::wp_mult_xor ? "xor" : "plus";
      ojson f = ojson::array(), g = ojson::array();
      for (const auto& row : s.f) {
        ojson r = ojson::array();
        for (const auto& u : row) r.push_back(emit_univariate(u));
        f.push_back(r);
      }
      for (const auto& row : s.g) {
        ojson r = ojson::array();
        for (const auto& u : row) r.push_back(emit_univariate(u));
        g.push_back(r);
      }
      o["f"] = f;
      o["g"] = g;
      if (!s.even.empty()) {
        ojson e = ojson::array();
        for (const auto& u : s.even) {
          if (!u) {
            e.push_back(nullptr);
          } else if (u->constant) {
            e.push_back(ojson{{"const", word_json(*u->constant)}});
          } else {
            e.push_back(print_expr(*u->expr));
          }
        }
        o["even"] = e;
      }
      break;
    }
    case Construction::wreath_lift:
      o["construction"] = "wreath_lift";
      o["base_n"] = s.base_n;
      if (s.table_seed) {
        o["table_seed"] = *s.table_seed;
      } else {
        o["table"] = s.table;
      }
      o["inner"] = emit_map(s.inner.at(0));
      break;
    case Construction::custom: throw std::logic_error("custom maps have no config form");
  }
  return o;
}

std::vector<WordN> read_vector(const json& j, unsigned m, unsigned n, const std::string& path) {
  array_of(j, m, path);
  std::vector<WordN> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(read_word(j[i], n, at(path, i)));
  return out;
}

ojson emit_vector(const std::vector<WordN>& v) {
  ojson a = ojson::array();
  for (const auto& w : v) a.push_back(word_json(w));
  return a;
}

std::vector<std::uint64_t> read_seeds(const json& j, unsigned M, const std::string& path) {
  array_of(j, M, path);
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < M; ++i) out.push_back(read_u64(j[i], at(path, i)));
  return out;
}

std::vector<MapSpec> read_maps(const json& j, unsigned M, unsigned m, const std::string& path) {
  array_of(j, M, path);
  std::vector<MapSpec> out;
  for (std::size_t i = 0; i < M; ++i) out.push_back(read_map(j[i], m, at(path, i)));
  return out;
}

CounterSpec read_counter(const json& j, unsigned m, unsigned n, const std::string& path) {
  only_keys(j, path, {"M", "c", "transition_seeds", "output_seeds", "transitions", "outputs"});
  CounterSpec s;
  s.M = read_unsigned(required(j, "M", path), path + ".M", 0, 1U << 16);
  const json& c = required(j, "c", path);
  if (!c.is_array()) fail(path + ".c", "expected an array");
  for (std::size_t i = 0; i < c.size(); ++i) s.c.push_back(read_vector(c[i], m, n, at(path + ".c", i)));
  const unsigned M = static_cast<unsigned>(c.size());
  if (j.contains("transition_seeds") == j.contains("transitions"))
    fail(path, "give exactly one of \"transition_seeds\" and \"transitions\"");
  if (j.contains("output_seeds") && j.contains("outputs")) fail(path, "give at most one of \"output_seeds\" and \"outputs\"");
  if (j.contains("transition_seeds")) s.transition_seeds = read_seeds(j["transition_seeds"], M, path + ".transition_seeds");
  if (j.contains("transitions")) s.transitions = read_maps(j["transitions"], M, m, path + ".transitions");
  if (j.contains("output_seeds")) s.output_seeds = read_seeds(j["output_seeds"], M, path + ".output_seeds");
  if (j.contains("outputs")) s.outputs = read_maps(j["outputs"], M, m, path + ".outputs");
  if (s.output_seeds.empty() && s.outputs.empty()) {
    s.output_seeds = s.transition_seeds;
    s.outputs = s.transitions;
  }
  return s;
}

MultivariateMap seeded_map(std::uint64_t seed, unsigned m, unsigned n) {
  return conjugate_multivariate(mk_ergodic(random_expr(seed, kCounterSeedDepth)), m, n);
}

void collect_univariates(const MapSpec& s, const std::string& label,
                         std::vector<std::pair<std::string, UnivariateMap>>& out) {
  if (s.h) out.emplace_back(label + ".h", build_univariate(*s.h));
  for (std::size_t t = 0; t < s.f.size(); ++t)
    for (std::size_t r = 0; r < s.f[t].size(); ++r) out.emplace_back(at(at(label + ".f", t), r), build_univariate(s.f[t][r]));
  for (std::size_t t = 0; t < s.g.size(); ++t)
    for (std::size_t r = 0; r < s.g[t].size(); ++r) out.emplace_back(at(at(label + ".g", t), r), build_univariate(s.g[t][r]));
  for (const auto& inner : s.inner) collect_univariates(inner, label + ".inner", out);
}

}  // namespace

Config Config::parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const std::string root = "config";
  only_keys(j, root, {"m", "n", "H", "F", "pi", "seed", "counter"});
  Config c;
  c.m = read_unsigned(required(j, "m", root), "config.m", 1, kMaxWidth);
  c.n = read_unsigned(required(j, "n", root), "config.n", 1, kMaxWidth);
  if (c.m * c.n > kMaxWidth) fail(root, "m*n must not exceed " + std::to_string(kMaxWidth));
  if (j.contains("H")) c.H = read_map(j["H"], c.m, "config.H");
  if (j.contains("F")) c.F = read_map(j["F"], c.m, "config.F");
  if (j.contains("counter")) c.counter = read_counter(j["counter"], c.m, c.n, "config.counter");
  if (!c.H && !c.counter) fail(root, "missing \"H\" (or a \"counter\" block)");
  if (c.F && !c.H) fail(root, "\"F\" given without \"H\"");
  if (j.contains("pi")) {
    const json& pi = j["pi"];
    if (pi == "reverse") {
      c.pi.kind = BitPermutation::Kind::reverse;
    } else if (pi == "rotate_up") {
      c.pi.kind = BitPermutation::Kind::rotate_up;
    } else if (pi.is_array()) {
      c.pi.kind = BitPermutation::Kind::custom;
      array_of(pi, c.n, "config.pi");
      for (std::size_t i = 0; i < c.n; ++i) c.pi.table.push_back(read_unsigned(pi[i], at("config.pi", i), 0, c.n - 1));
    } else {
      fail("config.pi", "must be \"reverse\", \"rotate_up\" or a destination table");
    }
  }
  c.seed = j.contains("seed") ? read_vector(j["seed"], c.m, c.n, "config.seed")
                              : std::vector<WordN>(c.m, WordN(c.n));
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw std::runtime_error("cannot read config file " + path);
  return parse(text.str());
}

std::string Config::emit() const {
  ojson o = ojson::object();
  o["m"] = m;
  o["n"] = n;
  if (H) o["H"] = emit_map(*H);
  if (F) o["F"] = emit_map(*F);
  if (pi.kind == BitPermutation::Kind::custom) {
    o["pi"] = pi.table;
  } else {
    o["pi"] = pi.kind == BitPermutation::Kind::reverse ? "reverse" : "rotate_up";
  }
  o["seed"] = emit_vector(seed);
  if (counter) {
    ojson c = ojson::object();
    c["M"] = counter->M;
    ojson rows = ojson::array();
    for (const auto& row : counter->c) rows.push_back(emit_vector(row));
    c["c"] = rows;
    auto maps = [](const std::vector<MapSpec>& v) {
      ojson a = ojson::array();
      for (const auto& s : v) a.push_back(emit_map(s));
      return a;
    };
    if (!counter->transition_seeds.empty()) c["transition_seeds"] = counter->transition_seeds;
    if (!counter->transitions.empty()) c["transitions"] = maps(counter->transitions);
    if (!counter->output_seeds.empty()) c["output_seeds"] = counter->output_seeds;
    if (!counter->outputs.empty()) c["outputs"] = maps(counter->outputs);
    o["counter"] = c;
  }
  return o.dump(2) + "\n";
}

UnivariateMap build_univariate(const UnivariateSpec& s) {
  switch (s.form) {
    case UnivariateSpec::Form::ergodic: return mk_ergodic(s.expr);
    case UnivariateSpec::Form::measure_preserving: return mk_measure_preserving(s.expr, s.d);
    case UnivariateSpec::Form::raw: break;
  }
  return UnivariateMap::from_expr(s.expr, s.kind);
}

MultivariateMap build_map(const MapSpec& s, unsigned m, unsigned n) {
  switch (s.construction) {
    case Construction::conjugate: return conjugate_multivariate(build_univariate(*s.h), m, n);
    case Construction::klimov_shamir: return mk_klimov_shamir(build_univariate(*s.h), m, n);
    case Construction::wp_mult_xor:
    case Construction::wp_mult_plus: {
      std::vector<std::vector<UnivariateMap>> f, g;
      for (const auto& row : s.f) {
        f.emplace_back();
        for (const auto& u : row) f.back().push_back(build_univariate(u));
      }
      for (const auto& row : s.g) {
        g.emplace_back();
        for (const auto& u : row) g.back().push_back(build_univariate(u));
      }
      std::vector<std::optional<EvenParameter>> even;
      for (const auto& u : s.even) {
        if (!u) {
          even.emplace_back();
        } else if (u->constant) {
          even.push_back(EvenParameter::constant(u->constant->resized(n), m, n));
        } else {
          even.push_back(EvenParameter::from_interleaved_expr(*u->expr, m, n));
        }
      }
      const Combine combine = s.construction == Construction::wp_mult_xor ? Combine::bit_xor : Combine::plus;
      return mk_multivariate_ergodic(n, f, g, combine, std::move(even));
    }
    case Construction::wreath_lift: {
      if (n < s.base_n) throw ConfigError("wreath_lift needs n >= base_n");
      std::optional<PermutationTable> T;
      if (s.table_seed) {
        std::mt19937_64 rng(*s.table_seed);
        T = PermutationTable::random_single_cycle(m, s.base_n, rng);
      } else {
        T = PermutationTable(m, s.base_n, s.table);
      }
      return wreath_lift(*T, build_map(s.inner.at(0), m, n));
    }
    case Construction::custom: break;
  }
  throw ConfigError("custom maps have no config form");
}

BuiltConfig build(const Config& cfg, std::optional<unsigned> width) {
  const unsigned w = width.value_or(cfg.n);
  if (w < 1 || w > cfg.n) throw std::invalid_argument("generator width must be in [1, n]");
  BuiltConfig out;
  BitPermutation pi = cfg.pi.kind == BitPermutation::Kind::custom ? BitPermutation::custom(cfg.pi.table)
                                                                  : mk_pi(w, cfg.pi.kind);
  if (pi.width() != w) throw ConfigError("config.pi: a custom table cannot be used below width n");
  std::vector<WordN> seed;
  for (const auto& s : cfg.seed) seed.push_back(s.resized(w));

  if (cfg.counter) {
    const CounterSpec& k = *cfg.counter;
    std::vector<StateVector> c;
    for (const auto& row : k.c) {
      std::vector<WordN> v;
      for (const auto& x : row) v.push_back(x.resized(w));
      c.emplace_back(v);
    }
    for (std::size_t j = 0; j < k.transition_seeds.size(); ++j) out.transitions.push_back(seeded_map(k.transition_seeds[j], cfg.m, w));
    for (std::size_t j = 0; j < k.transitions.size(); ++j) {
      out.transitions.push_back(build_map(k.transitions[j], cfg.m, w));
      collect_univariates(k.transitions[j], at("counter.transitions", j), out.univariates);
    }
    for (std::size_t j = 0; j < k.output_seeds.size(); ++j) out.outputs.push_back(seeded_map(k.output_seeds[j], cfg.m, w));
    for (std::size_t j = 0; j < k.outputs.size(); ++j) {
      out.outputs.push_back(build_map(k.outputs[j], cfg.m, w));
      if (j >= k.transitions.size() || emit_map(k.outputs[j]) != emit_map(k.transitions[j]))
        collect_univariates(k.outputs[j], at("counter.outputs", j), out.univariates);
    }
    for (std::size_t j = 0; j < k.transition_seeds.size(); ++j)
      out.univariates.emplace_back(at("counter.transition_seeds", j),
                                   mk_ergodic(random_expr(k.transition_seeds[j], kCounterSeedDepth)));
    for (std::size_t j = 0; j < k.output_seeds.size(); ++j)
      if (j >= k.transition_seeds.size() || k.output_seeds[j] != k.transition_seeds[j])
        out.univariates.emplace_back(at("counter.output_seeds", j),
                                     mk_ergodic(random_expr(k.output_seeds[j], kCounterSeedDepth)));
    out.counter = std::make_shared<const CounterDependentConfig>(k.M, std::move(c), out.transitions, out.outputs, pi);
    out.generator = std::make_unique<CounterDependentGenerator>(out.counter, StateVector(seed));
    return out;
  }

  out.transitions.push_back(build_map(*cfg.H, cfg.m, w));
  collect_univariates(*cfg.H, "H", out.univariates);
  if (cfg.F) {
    out.outputs.push_back(build_map(*cfg.F, cfg.m, w));
    collect_univariates(*cfg.F, "F", out.univariates);
  } else {
    out.outputs.push_back(out.transitions.front());
  }
  out.generator = std::make_unique<PlainGenerator>(out.transitions.front(), out.outputs.front(), pi, StateVector(seed));
  return out;
}

std::unique_ptr<KeystreamGenerator> build_baseline(const Config& cfg) {
  UnivariateMap U = mk_ergodic(TFuncExpr::constant(0));
  if (cfg.H && cfg.H->h) U = build_univariate(*cfg.H->h);
  const MultivariateMap H = conjugate_multivariate(U, cfg.m, cfg.n);
  const BitPermutation pi = cfg.pi.kind == BitPermutation::Kind::custom ? BitPermutation::custom(cfg.pi.table)
                                                                        : mk_pi(cfg.n, cfg.pi.kind);
  return std::make_unique<PlainGenerator>(H, H, pi, StateVector(cfg.seed));
}

}  // namespace ergodic
