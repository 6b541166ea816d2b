#include "dlms/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <system_error>

namespace dlms {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& text, const std::string& key, const char* what) {
  T v{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty())
    throw ConfigError(key, std::string("expected ") + what + ", got '" + text + "'");
  return v;
}

int as_int(const std::string& v, const std::string& key) { return parse_number<int>(v, key, "an integer"); }
std::uint64_t as_u64(const std::string& v, const std::string& key) {
  return parse_number<std::uint64_t>(v, key, "a nonnegative integer");
}
double as_double(const std::string& v, const std::string& key) {
  const double x = parse_number<double>(v, key, "a number");
  if (!std::isfinite(x)) throw ConfigError(key, "expected a finite number, got '" + v + "'");
  return x;
}

bool as_bool(const std::string& v, const std::string& key) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::vector<double> as_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(v);
  while (std::getline(ss, item, ',')) out.push_back(as_double(trim(item), key));
  if (out.empty()) throw ConfigError(key, "expected a comma-separated list of numbers");
  return out;
}

template <typename E>
E as_choice(const std::string& v, const std::string& key,
            std::initializer_list<std::pair<const char*, E>> choices) {
  std::string names;
  for (const auto& [name, value] : choices) {
    if (v == name) return value;
    names += names.empty() ? name : std::string(", ") + name;
  }
  throw ConfigError(key, "expected one of {" + names + "}, got '" + v + "'");
}

std::string fmt(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out;
}

bool valid_label(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

struct Field {
  const char* section;
  const char* name;
  Setter set;
};

struct ParseState {
  std::filesystem::path base_dir;
  bool order_given = false;
};

std::filesystem::path resolve_path(const std::string& v, const std::filesystem::path& base) {
  std::filesystem::path p(v);
  if (p.is_relative() && !base.empty()) p = (base / p).lexically_normal();
  return p;
}

std::vector<Field> fields(ParseState& st) {
  return {
      {"run", "horizon", [](auto& c, auto& v, auto& k) { c.horizon = as_int(v, k); }},
      {"run", "trials", [](auto& c, auto& v, auto& k) { c.trials = as_int(v, k); }},
      {"run", "base_seed", [](auto& c, auto& v, auto& k) { c.base_seed = as_u64(v, k); }},
      {"run", "steady_window", [](auto& c, auto& v, auto& k) { c.steady_window = as_int(v, k); }},
      {"run", "divergence_threshold",
       [](auto& c, auto& v, auto& k) { c.divergence_threshold = as_double(v, k); }},
      {"run", "denoise_algorithm", [](auto& c, auto& v, auto&) { c.denoise_algorithm = v; }},

      {"network", "topology",
       [](auto& c, auto& v, auto& k) {
         c.topology.kind = as_choice<TopologyKind>(v, k,
                                                   {{"geometric", TopologyKind::random_geometric},
                                                    {"ring", TopologyKind::ring_lattice},
                                                    {"edge_list", TopologyKind::edge_list}});
       }},
      {"network", "nodes", [](auto& c, auto& v, auto& k) { c.topology.nodes = as_int(v, k); }},
      {"network", "radius", [](auto& c, auto& v, auto& k) { c.topology.radius = as_double(v, k); }},
      {"network", "half_width", [](auto& c, auto& v, auto& k) { c.topology.half_width = as_int(v, k); }},
      {"network", "seed", [](auto& c, auto& v, auto& k) { c.topology.seed = as_u64(v, k); }},
      {"network", "edge_list",
       [&st](auto& c, auto& v, auto&) { c.topology.edge_list = resolve_path(v, st.base_dir); }},
      {"network", "weights",
       [](auto& c, auto& v, auto& k) {
         c.weights = as_choice<WeightRule>(
             v, k, {{"uniform", WeightRule::uniform}, {"non_cooperative", WeightRule::non_cooperative}});
       }},

      {"system", "order",
       [&st](auto& c, auto& v, auto& k) {
         c.order = as_int(v, k);
         st.order_given = true;
       }},
      {"system", "coefficients", [](auto& c, auto& v, auto& k) { c.coefficients = as_list(v, k); }},

      {"source", "kind",
       [](auto& c, auto& v, auto& k) {
         c.source = as_choice<SourceKind>(
             v, k, {{"gaussian", SourceKind::white_gaussian}, {"delay_line", SourceKind::delay_line}});
       }},
      {"source", "variances", [](auto& c, auto& v, auto& k) { c.variances = as_list(v, k); }},
      {"source", "variance_min", [](auto& c, auto& v, auto& k) { c.variance_min = as_double(v, k); }},
      {"source", "variance_max", [](auto& c, auto& v, auto& k) { c.variance_max = as_double(v, k); }},
      {"source", "variance_seed", [](auto& c, auto& v, auto& k) { c.variance_seed = as_u64(v, k); }},
      {"source", "samples", [&st](auto& c, auto& v, auto&) { c.samples = resolve_path(v, st.base_dir); }},
      {"source", "synthetic_length", [](auto& c, auto& v, auto& k) { c.synthetic_length = as_int(v, k); }},
      {"source", "scale_exponent", [](auto& c, auto& v, auto& k) { c.scale_exponent = as_double(v, k); }},

      {"noise", "snr_db", [](auto& c, auto& v, auto& k) { c.snr_db = as_double(v, k); }},
      {"noise", "variance", [](auto& c, auto& v, auto& k) { c.noise_variance = as_double(v, k); }},

      {"algorithms", "mu", [](auto& c, auto& v, auto& k) { c.mu = as_double(v, k); }},
      {"algorithms", "gamma", [](auto& c, auto& v, auto& k) { c.gamma = as_double(v, k); }},
  };
}

void set_algorithm_key(AlgorithmEntry& a, const std::string& name, const std::string& value,
                       const std::string& key) {
  if (name == "ordering")
    a.ordering = as_choice<Ordering>(value, key, {{"atc", Ordering::atc}, {"cta", Ordering::cta}});
  else if (name == "leaky")
    a.leaky = as_bool(value, key);
  else if (name == "mu")
    a.mu = as_double(value, key);
  else if (name == "gamma")
    a.gamma = as_double(value, key);
  else
    throw ConfigError(key, "unknown key");
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  ParseState st{base_dir};
  const std::vector<Field> table = fields(st);
  ExperimentConfig cfg;
  std::vector<AlgorithmEntry> algorithms;
  std::set<std::string> seen;

  std::string section;  // empty before the first header
  AlgorithmEntry* current_alg = nullptr;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;

    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError("unterminated section header", lineno);
      const std::string name = trim(std::string_view(text).substr(1, text.size() - 2));
      current_alg = nullptr;
      if (name.rfind("algorithm ", 0) == 0) {
        const std::string label = trim(std::string_view(name).substr(10));
        if (!valid_label(label))
          throw ConfigError("algorithm label '" + label + "' must be [A-Za-z0-9_-]+", lineno);
        for (const auto& a : algorithms)
          if (a.label == label) throw ConfigError("duplicate algorithm '" + label + "'", lineno);
        algorithms.push_back({label, Ordering::atc, false, std::nullopt, std::nullopt});
        current_alg = &algorithms.back();
        section = "algorithm " + label;
        continue;
      }
      const bool known = std::any_of(table.begin(), table.end(), [&](const Field& f) { return name == f.section; });
      if (!known) throw ConfigError("unknown section [" + name + "]", lineno);
      section = name;
      continue;
    }

    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno);
    const std::string name = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (name.empty()) throw ConfigError("missing key before '='", lineno);

    if (current_alg) {
      const std::string key = current_alg->label + "." + name;
      if (!seen.insert(section + "." + name).second) throw ConfigError(key, "given twice");
      set_algorithm_key(*current_alg, name, value, key);
      continue;
    }

    const Field* field = nullptr;
    for (const auto& f : table)
      if (name == f.name && (section.empty() || section == f.section)) field = &f;
    const std::string key = section.empty() ? name : section + "." + name;
    if (!field) throw ConfigError(key, "unknown key");
    const std::string canonical = std::string(field->section) + "." + name;
    if (!seen.insert(canonical).second) throw ConfigError(key, "given twice");
    field->set(cfg, value, key);
  }

  if (!algorithms.empty()) cfg.algorithms = std::move(algorithms);
  if (cfg.coefficients && !st.order_given) cfg.order = static_cast<int>(cfg.coefficients->size());
  validate(cfg);
  return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  return parse_config(in, path.parent_path());
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const char* key, const char* what) {
    if (!ok) throw ConfigError(key, what);
  };
  require(c.horizon >= 1, "horizon", "must be >= 1");
  require(c.trials >= 1, "trials", "must be >= 1");
  require(c.steady_window >= 1, "steady_window", "must be >= 1");
  require(c.divergence_threshold > 0.0, "divergence_threshold", "must be > 0");

  require(c.topology.nodes >= 1, "nodes", "must be >= 1");
  require(c.topology.radius > 0.0, "radius", "must be > 0");
  require(c.topology.half_width >= 0, "half_width", "must be >= 0");
  if (c.topology.kind == TopologyKind::ring_lattice)
    require(2 * c.topology.half_width < c.topology.nodes, "half_width", "must satisfy 2*half_width < nodes");
  if (c.topology.kind == TopologyKind::edge_list)
    require(!c.topology.edge_list.empty(), "edge_list", "required when topology = edge_list");

  require(c.order >= 1, "order", "must be >= 1");
  if (c.coefficients) {
    require(static_cast<int>(c.coefficients->size()) == c.order, "coefficients", "length must equal order");
  }

  require(c.variance_min > 0.0, "variance_min", "must be > 0");
  require(c.variance_max >= c.variance_min, "variance_max", "must be >= variance_min");
  if (c.variances) {
    for (double v : *c.variances) require(v > 0.0, "variances", "entries must be > 0");
    if (c.topology.kind != TopologyKind::edge_list)
      require(static_cast<int>(c.variances->size()) == c.topology.nodes, "variances",
              "needs one entry per node");
  }
  require(c.synthetic_length >= c.order, "synthetic_length", "must be >= order");
  if (c.noise_variance) require(*c.noise_variance >= 0.0, "variance", "noise variance must be >= 0");

  require(c.mu >= 0.0, "mu", "must be >= 0");
  require(c.gamma >= 0.0, "gamma", "must be >= 0");
  require(!c.algorithms.empty(), "algorithm", "at least one algorithm is required");
  std::set<std::string> labels;
  for (const auto& a : c.algorithms) {
    if (!valid_label(a.label)) throw ConfigError(a.label, "algorithm label must be [A-Za-z0-9_-]+");
    if (!labels.insert(a.label).second) throw ConfigError(a.label, "duplicate algorithm label");
    if (a.mu && !(*a.mu >= 0.0)) throw ConfigError(a.label + ".mu", "must be >= 0");
    if (a.gamma && !(*a.gamma >= 0.0)) throw ConfigError(a.label + ".gamma", "must be >= 0");
  }
}

std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "[run]\n"
    << "horizon = " << c.horizon << '\n'
    << "trials = " << c.trials << '\n'
    << "base_seed = " << c.base_seed << '\n'
    << "steady_window = " << c.steady_window << '\n'
    << "divergence_threshold = " << fmt(c.divergence_threshold) << '\n'
    << "denoise_algorithm = " << c.denoise_algorithm << '\n';

  o << "\n[network]\n";
  switch (c.topology.kind) {
    case TopologyKind::random_geometric: o << "topology = geometric\n"; break;
    case TopologyKind::ring_lattice: o << "topology = ring\n"; break;
    case TopologyKind::edge_list: o << "topology = edge_list\n"; break;
  }
  o << "nodes = " << c.topology.nodes << '\n'
    << "radius = " << fmt(c.topology.radius) << '\n'
    << "half_width = " << c.topology.half_width << '\n';
  if (c.topology.seed) o << "seed = " << *c.topology.seed << '\n';
  if (!c.topology.edge_list.empty()) o << "edge_list = " << c.topology.edge_list.string() << '\n';
  o << "weights = " << (c.weights == WeightRule::uniform ? "uniform" : "non_cooperative") << '\n';

  o << "\n[system]\n"
    << "order = " << c.order << '\n';
  if (c.coefficients) o << "coefficients = " << fmt_list(*c.coefficients) << '\n';

  o << "\n[source]\n"
    << "kind = " << (c.source == SourceKind::white_gaussian ? "gaussian" : "delay_line") << '\n';
  if (c.variances) o << "variances = " << fmt_list(*c.variances) << '\n';
  o << "variance_min = " << fmt(c.variance_min) << '\n'
    << "variance_max = " << fmt(c.variance_max) << '\n';
  if (c.variance_seed) o << "variance_seed = " << *c.variance_seed << '\n';
  if (!c.samples.empty()) o << "samples = " << c.samples.string() << '\n';
  o << "synthetic_length = " << c.synthetic_length << '\n'
    << "scale_exponent = " << fmt(c.scale_exponent) << '\n';

  o << "\n[noise]\n"
    << "snr_db = " << fmt(c.snr_db) << '\n';
  if (c.noise_variance) o << "variance = " << fmt(*c.noise_variance) << '\n';

  o << "\n[algorithms]\n"
    << "mu = " << fmt(c.mu) << '\n'
    << "gamma = " << fmt(c.gamma) << '\n';
  for (const auto& a : c.algorithms) {
    o << "\n[algorithm " << a.label << "]\n"
      << "ordering = " << (a.ordering == Ordering::atc ? "atc" : "cta") << '\n'
      << "leaky = " << (a.leaky ? "true" : "false") << '\n';
    if (a.mu) o << "mu = " << fmt(*a.mu) << '\n';
    if (a.gamma) o << "gamma = " << fmt(*a.gamma) << '\n';
  }
  return o.str();
}

}  // namespace dlms
