#include "cogrowth/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cogrowth/errors.hpp"

namespace cogrowth {

namespace {

constexpr const char* kRunKeys[] = {"experiment", "seed", "stream", "format", "out", "budget"};

bool is_run_key(std::string_view key) {
  return std::find(std::begin(kRunKeys), std::end(kRunKeys), key) != std::end(kRunKeys);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad(const std::string& path, const std::string& message) {
  throw PreconditionError(path + ": " + message);
}

std::optional<std::uint64_t> to_uint(std::string_view s) {
  std::uint64_t v = 0;
  if (s.empty()) return std::nullopt;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> to_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  // Named constants keep configs exact and readable.
  if (s == "log2") return std::log(2.0);
  if (s == "log3") return std::log(3.0);
  if (s == "log5") return std::log(5.0);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

void check_value(const ParamSpec& spec, const std::string& value, const std::string& path) {
  auto each = [&](auto&& conv, const char* what) {
    const auto items = split_list(value);
    if (items.empty()) bad(path, std::string("expected a list of ") + what);
    for (const auto& it : items) {
      if (!conv(it)) bad(path, std::string("expected ") + what + ", got '" + it + "'");
    }
  };
  switch (spec.type) {
    case ParamType::uint:
      if (!to_uint(value)) bad(path, "expected a non-negative integer, got '" + value + "'");
      break;
    case ParamType::real:
      if (!to_real(value)) bad(path, "expected a real number, got '" + value + "'");
      break;
    case ParamType::text:
      if (value.empty()) bad(path, "empty value");
      break;
    case ParamType::uint_list:
      each([](const std::string& s) { return to_uint(s).has_value(); }, "non-negative integers");
      break;
    case ParamType::real_list:
      each([](const std::string& s) { return to_real(s).has_value(); }, "real numbers");
      break;
  }
}

ParamSpec u(std::string n, std::string d, std::string h) {
  return {std::move(n), ParamType::uint, std::move(d), std::move(h)};
}
ParamSpec r(std::string n, std::string d, std::string h) {
  return {std::move(n), ParamType::real, std::move(d), std::move(h)};
}
ParamSpec t(std::string n, std::string d, std::string h) {
  return {std::move(n), ParamType::text, std::move(d), std::move(h)};
}
ParamSpec ul(std::string n, std::string d, std::string h) {
  return {std::move(n), ParamType::uint_list, std::move(d), std::move(h)};
}
ParamSpec rl(std::string n, std::string d, std::string h) {
  return {std::move(n), ParamType::real_list, std::move(d), std::move(h)};
}

const char* kMeasureHelp = "uniform | nn:<w_a>,<w_A>,<w_b>,... | file:<distribution file>";
const char* kSubgroupHelp = "gens:<w1>,<w2>,... | free | trivial | file:<core graph file>";

std::vector<ExperimentSchema> build_schemas() {
  const ParamSpec k = u("k", "2", "free group rank");
  const ParamSpec measure = t("measure", "uniform", kMeasureHelp);
  const ParamSpec n = u("n", "2000", "walk length");
  const ParamSpec m = u("m", "2000", "number of sample paths");
  const ParamSpec subgroup = t("subgroup", "gens:a", kSubgroupHelp);
  return {
      {"drift", "drift l(mu) by Monte Carlo", {k, measure, n, m}},
      {"entropy",
       "asymptotic entropy h(mu)",
       {k, measure, t("method", "exact", "exact | green"), u("n_max", "0", "convolution depth, 0 = auto"),
        n, m, u("f_horizon", "200", "first-passage horizon for the Green metric"),
        u("max_states", "4000000", "support cap for the exact convolution")}},
      {"delta-mu",
       "delta(mu) = h / l",
       {k, measure, t("method", "both", "exact | green | both"), u("n_max", "0", "convolution depth, 0 = auto"),
        n, m, u("f_horizon", "200", "first-passage horizon for the Green metric"),
        u("max_states", "4000000", "support cap for the exact convolution")}},
      {"green",
       "first-passage probabilities F(e, g) and G(e, e)",
       {k, measure, t("targets", "a,ab", "comma-separated words"), u("horizon", "60", "DP horizon")}},
      {"hitting",
       "mean tau_i / i for thick annuli",
       {k, measure, ul("i", "50,100,200", "annulus radii"), r("q", "0.3333333333333333", "thickness exponent in (0, 1)"),
        u("m", "500", "number of sample paths"), r("horizon_factor", "8", "step cap factor")}},
      {"tanaka",
       "pointwise decay -log nu_i(g) / i",
       {k, measure, ul("i", "100,200,400", "annulus radii"), r("q", "0.3333333333333333", "thickness exponent in (0, 1)"),
        u("m", "500", "number of sample paths"), u("f_horizon", "60", "first-passage horizon"),
        u("direct_max_i", "6", "largest i for the direct top-atom observable")}},
      {"poincare",
       "Poincare partial sums of a subgroup",
       {k, subgroup,
        t("W", "-", "- (use the subgroup) | all | none | axis:<word> | mod-length:<r>,<m> | subgroup:<file>"),
        r("s", "log3", "exponent s >= 0"), u("j_max", "30", "largest word length")}},
      {"subgroup-delta",
       "critical exponent of a finitely generated subgroup",
       {k, subgroup, u("n_oracle", "16", "length for the ball-count cross-check")}},
      {"systole",
       "systole of a conjugate g^-1 H g",
       {k, subgroup, t("g", "1", "conjugating word"), u("radius", "25", "search radius")}},
      {"confine",
       "confinement probe at threshold T",
       {k, subgroup, u("T", "50", "systole threshold")}},
      {"quotient-growth",
       "growth of ker(F_k -> Q)",
       {k, t("quotient", "cyclic:2:1,1", "trivial | free | cyclic:n:i1,... | perm:p1;p2 | psl2:p:a,b,c,d;..."),
        u("n_max", "12", "largest word length")}},
      {"srs",
       "stationary random subgroup pipeline delta(Delta) > delta(mu) / 2",
       {k, measure, t("base", "gens:a,baB", kSubgroupHelp),
        t("V", "ball:2", "ball:<L> (nontrivial words of length <= L) | list:<words file>"),
        u("cesaro_N", "0", "0: use the base; N > 0: conjugate by a Cesaro sample with horizon N"),
        u("steps", "2000", "walk length"), u("paths", "20", "number of walks"),
        t("delta_mu", "auto", "delta(mu) value or auto"), u("delta_n", "2000", "walk length for auto delta_mu"),
        u("delta_m", "200", "paths for auto delta_mu"), r("gate", "0.05", "visit frequency gate")}},
      {"freeproduct",
       "free-product lattice A * B on its Bass-Serre tree",
       {t("spec", "cyclic:2,3", "cyclic:<|A|>,<|B|> | file:<spec file>"), n, m,
        u("f_horizon", "400", "first-passage horizon"), u("n_max", "16", "largest tree distance for orbit counts")}},
      {"elstrodt",
       "lambda_0 as a function of the critical exponent",
       {r("d", "2", "dimension d > 0"), rl("deltas", "0,0.5,1,1.5,2", "critical exponents in [0, d]")}},
      {"grigorchuk",
       "cogrowth spectral radius and truncated-tree power iteration",
       {k, rl("deltas", "0,0.5493061443340549,log3", "cogrowth exponents in [0, log(2k-1)]"),
        u("tree_depth", "64", "radial truncation depth"), u("explicit_depth", "8", "explicit tree depth")}},
  };
}

}  // namespace

const ParamSpec* ExperimentSchema::find(std::string_view key) const {
  for (const auto& p : params) {
    if (p.name == key) return &p;
  }
  return nullptr;
}

const std::vector<ExperimentSchema>& experiment_schemas() {
  static const std::vector<ExperimentSchema> schemas = build_schemas();
  return schemas;
}

const ExperimentSchema& schema_for(const std::string& experiment) {
  for (const auto& s : experiment_schemas()) {
    if (s.name == experiment) return s;
  }
  bad("experiment", "unknown experiment '" + experiment + "'");
}

const std::string* ExperimentConfig::param(std::string_view key) const {
  for (const auto& [k, v] : params) {
    if (k == key) return &v;
  }
  return nullptr;
}

void ExperimentConfig::set_param(const std::string& key, const std::string& value) {
  const auto& schema = schema_for(experiment);
  const ParamSpec* spec = schema.find(key);
  if (!spec) bad("params." + key, "unknown key for experiment '" + experiment + "'");
  check_value(*spec, value, "params." + key);
  for (auto& kv : params) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  params.emplace_back(key, value);
  auto order = [&](const std::string& name) {
    for (std::size_t i = 0; i < schema.params.size(); ++i) {
      if (schema.params[i].name == name) return i;
    }
    return schema.params.size();
  };
  std::stable_sort(params.begin(), params.end(),
                   [&](const auto& x, const auto& y) { return order(x.first) < order(y.first); });
}

void ExperimentConfig::apply(const std::string& key, const std::string& value) {
  if (key == "experiment") {
    schema_for(value);
    experiment = value;
  } else if (key == "seed" || key == "stream" || key == "budget") {
    const auto v = to_uint(value);
    if (!v) bad(key, "expected a non-negative integer, got '" + value + "'");
    if (key == "seed") seed = *v;
    if (key == "stream") stream = *v;
    if (key == "budget") {
      if (*v == 0) bad(key, "budget must be positive");
      budget = *v;
    }
  } else if (key == "format") {
    if (value != "json" && value != "csv") bad(key, "expected json or csv, got '" + value + "'");
    format = value;
  } else if (key == "out") {
    out = value;
  } else {
    if (experiment.empty()) bad("params." + key, "experiment must be set before parameters");
    set_param(key, value);
  }
}

ExperimentConfig ExperimentConfig::with_defaults() const {
  ExperimentConfig c = *this;
  for (const auto& p : schema_for(experiment).params) {
    if (!c.param(p.name)) c.set_param(p.name, p.default_value);
  }
  return c;
}

ExperimentConfig parse_config(std::string_view text) {
  struct Entry {
    std::string section, key, value;
    std::size_t line;
  };
  std::vector<Entry> entries;
  std::string section = "run";
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    if (body.front() == '[') {
      if (body.back() != ']') bad(where, "malformed section header '" + body + "'");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      if (section != "run" && section != "params") bad(where, "unknown section [" + section + "]");
      continue;
    }
    // Normalise `key = value` to `key=value`, then split on whitespace.
    std::string norm;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '=') {
        while (!norm.empty() && (norm.back() == ' ' || norm.back() == '\t')) norm.pop_back();
        norm += '=';
        while (i + 1 < body.size() && (body[i + 1] == ' ' || body[i + 1] == '\t')) ++i;
      } else {
        norm += body[i];
      }
    }
    std::istringstream tokens(norm);
    std::string tok;
    while (tokens >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0) bad(where, "expected key=value, got '" + tok + "'");
      entries.push_back({section, tok.substr(0, eq), tok.substr(eq + 1), line_no});
    }
  }

  ExperimentConfig c;
  for (const auto& e : entries) {
    if (e.section == "run" && e.key == "experiment") c.apply("experiment", e.value);
  }
  if (c.experiment.empty()) bad("experiment", "missing");
  std::vector<std::string> seen;
  for (const auto& e : entries) {
    const bool run_key = e.section == "run" && is_run_key(e.key);
    const std::string path = run_key ? e.key : "params." + e.key;
    if (std::find(seen.begin(), seen.end(), path) != seen.end()) bad(path, "duplicate key");
    seen.push_back(path);
    if (e.key == "experiment") continue;
    if (run_key) {
      c.apply(e.key, e.value);
    } else {
      c.set_param(e.key, e.value);
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("config: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  ExperimentConfig c = parse_config(ss.str());
  c.base_dir = path.parent_path();
  return c;
}

std::string serialize(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "experiment = " << c.experiment << "\n";
  out << "seed = " << c.seed << "\n";
  out << "stream = " << c.stream << "\n";
  out << "format = " << c.format << "\n";
  if (!c.out.empty()) out << "out = " << c.out << "\n";
  if (c.budget) out << "budget = " << *c.budget << "\n";
  if (!c.params.empty()) {
    out << "\n[params]\n";
    for (const auto& [k, v] : c.params) out << k << " = " << v << "\n";
  }
  return out.str();
}

ParamReader::ParamReader(const ExperimentConfig& c) : config_(c.with_defaults()) {}

const std::string& ParamReader::raw(const std::string& key) const {
  const std::string* v = config_.param(key);
  if (!v) fail(key, "not a parameter of '" + config_.experiment + "'");
  return *v;
}

void ParamReader::fail(const std::string& key, const std::string& message) const {
  bad("params." + key, message);
}

std::uint64_t ParamReader::uint(const std::string& key) const {
  const auto v = to_uint(raw(key));
  if (!v) fail(key, "expected a non-negative integer");
  return *v;
}

double ParamReader::real(const std::string& key) const {
  const auto v = to_real(raw(key));
  if (!v) fail(key, "expected a real number");
  return *v;
}

const std::string& ParamReader::text(const std::string& key) const { return raw(key); }

std::vector<std::uint64_t> ParamReader::uint_list(const std::string& key) const {
  std::vector<std::uint64_t> out;
  for (const auto& s : split_list(raw(key))) {
    const auto v = to_uint(s);
    if (!v) fail(key, "expected non-negative integers");
    out.push_back(*v);
  }
  return out;
}

std::vector<double> ParamReader::real_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : split_list(raw(key))) {
    const auto v = to_real(s);
    if (!v) fail(key, "expected real numbers");
    out.push_back(*v);
  }
  return out;
}

std::filesystem::path ParamReader::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_relative() && !config_.base_dir.empty()) p = config_.base_dir / p;
  return p;
}

}  // namespace cogrowth
