#include "depthlab/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "depthlab/core.hpp"

namespace depthlab {

namespace {

constexpr std::array<std::pair<ExperimentKind, std::string_view>, 6> kExperimentNames{{
    {ExperimentKind::kExpectedDepth, "expected-depth"},
    {ExperimentKind::kCramerSurface, "cramer-surface"},
    {ExperimentKind::kInclusionSuite, "inclusion-suite"},
    {ExperimentKind::kThresholdSweep, "threshold-sweep"},
    {ExperimentKind::kBoundSandwich, "bound-sandwich"},
    {ExperimentKind::kDilation, "dilation"},
}};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return value;
}

// A setter returns an error message, or an empty string on success.
using Setter = std::function<std::string(std::string_view, ExperimentConfig&)>;

Setter count_setter(std::size_t Budgets::*field) {
  return [field](std::string_view v, ExperimentConfig& c) -> std::string {
    const auto x = parse_number<long long>(v);
    if (!x) return "expected a positive integer, got '" + std::string(v) + "'";
    if (*x <= 0) return "must be positive, got " + std::string(v);
    c.budgets.*field = static_cast<std::size_t>(*x);
    return {};
  };
}

Setter tolerance_setter(double Tolerances::*field) {
  return [field](std::string_view v, ExperimentConfig& c) -> std::string {
    const auto x = parse_number<double>(v);
    if (!x || !std::isfinite(*x)) return "expected a number, got '" + std::string(v) + "'";
    if (*x <= 0.0) return "must be positive, got " + std::string(v);
    c.tolerances.*field = *x;
    return {};
  };
}

template <class T>
std::string parse_list(std::string_view v, std::vector<T>& out, bool (*valid)(T), const char* what) {
  std::vector<T> values;
  for (const std::string_view item : split_list(v)) {
    const auto x = parse_number<T>(item);
    if (!x || !valid(*x)) return std::string("expected a comma-separated list of ") + what + ", got '" + std::string(v) + "'";
    values.push_back(*x);
  }
  out = std::move(values);
  return {};
}

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const auto* table = new std::map<std::string, std::map<std::string, Setter>>{
      {"experiment",
       {
           {"type",
            [](std::string_view v, ExperimentConfig& c) -> std::string {
              const auto k = parse_experiment_kind(v);
              if (!k) {
                std::string msg = "unknown experiment '" + std::string(v) + "'; expected one of";
                for (const auto& [kind, name] : kExperimentNames) msg += " " + std::string(name);
                return msg;
              }
              c.experiment = *k;
              return {};
            }},
           {"measure",
            [](std::string_view v, ExperimentConfig& c) -> std::string {
              const auto k = parse_measure_kind(v);
              if (!k || *k == MeasureKind::kCustomDensity) {
                std::string msg = "unknown measure '" + std::string(v) + "'; expected one of";
                for (const MeasureKind kind : catalog_kinds()) msg += " " + std::string(kind_name(kind));
                return msg;
              }
              c.measure = *k;
              return {};
            }},
           {"dimensions",
            [](std::string_view v, ExperimentConfig& c) {
              return parse_list<int>(v, c.dimensions, [](int n) { return n >= 1 && n <= 64; },
                                     "dimensions in 1..64");
            }},
           {"seed",
            [](std::string_view v, ExperimentConfig& c) -> std::string {
              const auto x = parse_number<std::uint64_t>(v);
              if (!x) return "expected an unsigned integer, got '" + std::string(v) + "'";
              c.seed = *x;
              return {};
            }},
           {"counts",
            [](std::string_view v, ExperimentConfig& c) {
              return parse_list<std::size_t>(v, c.counts, [](std::size_t n) { return n >= 2; },
                                             "polytope sizes >= 2");
            }},
           {"orders",
            [](std::string_view v, ExperimentConfig& c) {
              return parse_list<double>(v, c.orders, [](double t) { return std::isfinite(t) && t > 0.0; },
                                        "positive orders");
            }},
           {"deltas",
            [](std::string_view v, ExperimentConfig& c) {
              return parse_list<double>(v, c.deltas, [](double d) { return std::isfinite(d) && d >= 0.0; },
                                        "nonnegative dilations");
            }},
           {"radii",
            [](std::string_view v, ExperimentConfig& c) {
              return parse_list<double>(v, c.radii, [](double r) { return std::isfinite(r) && r >= 0.0; },
                                        "nonnegative radii");
            }},
       }},
      {"budget",
       {
           {"samples", count_setter(&Budgets::samples)},
           {"reps", count_setter(&Budgets::reps)},
           {"test_points", count_setter(&Budgets::test_points)},
           {"net_size", count_setter(&Budgets::net_size)},
           {"refine_iters", count_setter(&Budgets::refine_iters)},
           {"mc_budget", count_setter(&Budgets::mc_budget)},
           {"directions", count_setter(&Budgets::directions)},
           {"kappa_samples", count_setter(&Budgets::kappa_samples)},
           {"polytope_vertices", count_setter(&Budgets::polytope_vertices)},
           {"polytopes", count_setter(&Budgets::polytopes)},
           {"max_count", count_setter(&Budgets::max_count)},
           {"seconds_per_point",
            [](std::string_view v, ExperimentConfig& c) -> std::string {
              const auto x = parse_number<double>(v);
              if (!x || !std::isfinite(*x)) return "expected a number, got '" + std::string(v) + "'";
              if (*x <= 0.0) return "must be positive, got " + std::string(v);
              c.budgets.seconds_per_point = *x;
              return {};
            }},
       }},
      {"tolerance",
       {
           {"sigmas", tolerance_setter(&Tolerances::sigmas)},
           {"identity", tolerance_setter(&Tolerances::identity)},
           {"cramer", tolerance_setter(&Tolerances::cramer)},
           {"grunbaum", tolerance_setter(&Tolerances::grunbaum)},
           {"volume", tolerance_setter(&Tolerances::volume)},
       }},
      {"output",
       {
           {"dir",
            [](std::string_view v, ExperimentConfig& c) -> std::string {
              if (v.empty()) return "must not be empty";
              c.output_dir = std::string(v);
              return {};
            }},
           {"formats",
            [](std::string_view v, ExperimentConfig& c) -> std::string {
              std::vector<std::string> formats;
              for (const std::string_view f : split_list(v)) {
                if (f != "csv" && f != "json" && f != "svg") {
                  return "unknown format '" + std::string(f) + "'; expected csv, json or svg";
                }
                if (std::find(formats.begin(), formats.end(), f) == formats.end()) formats.emplace_back(f);
              }
              c.formats = std::move(formats);
              return {};
            }},
           {"log_x",
            [](std::string_view v, ExperimentConfig& c) -> std::string {
              if (v == "true") {
                c.log_x = true;
              } else if (v == "false") {
                c.log_x = false;
              } else {
                return "expected true or false, got '" + std::string(v) + "'";
              }
              return {};
            }},
       }},
  };
  return *table;
}

std::string suggestion(std::string_view word, const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t best_distance = std::string::npos;
  for (const std::string& c : candidates) {
    const std::size_t d = edit_distance(word, c);
    if (d < best_distance) {
      best_distance = d;
      best = c;
    }
  }
  if (best.empty() || best_distance > std::max<std::size_t>(2, word.size() / 3)) return {};
  return "; did you mean '" + best + "'?";
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ",";
    if constexpr (std::is_same_v<T, double>) {
      out += format_double(values[i]);
    } else if constexpr (std::is_same_v<T, std::string>) {
      out += values[i];
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

}  // namespace

std::string_view experiment_name(ExperimentKind kind) {
  for (const auto& [k, name] : kExperimentNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) {
  for (const auto& [k, n] : kExperimentNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string format_error(const ConfigError& e) {
  std::string out;
  if (e.line > 0) out += "line " + std::to_string(e.line) + ": ";
  if (!e.key.empty()) out += e.key + ": ";
  return out + e.message;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

ConfigParseResult parse_config(std::string_view text) {
  ConfigParseResult result;
  ExperimentConfig config;
  const auto& sections = schema();
  std::vector<std::string> section_names;
  std::vector<std::string> all_keys;
  for (const auto& [name, keys] : sections) {
    section_names.push_back(name);
    for (const auto& [key, setter] : keys) all_keys.push_back(key);
  }

  std::string section;
  bool section_valid = false;
  std::set<std::string> seen;
  bool output_dir_given = false;
  std::size_t line_no = 0;
  while (!text.empty() || line_no == 0) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    // Comments start at '#' or ';' at the beginning of a line or after whitespace.
    for (std::size_t i = 0; i < line.size(); ++i) {
      if ((line[i] == '#' || line[i] == ';') && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) {
      if (nl == std::string_view::npos) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        result.errors.push_back({line_no, {}, "malformed section header '" + std::string(line) + "'"});
        section_valid = false;
        continue;
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      section_valid = sections.count(section) > 0;
      if (!section_valid) {
        result.errors.push_back(
            {line_no, {}, "unknown section [" + section + "]" + suggestion(section, section_names)});
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      result.errors.push_back({line_no, {}, "expected 'key = value', got '" + std::string(line) + "'"});
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty()) {
      result.errors.push_back({line_no, key, "key outside any section"});
      continue;
    }
    if (!section_valid) continue;  // already reported
    const std::string qualified = section + "." + key;
    const auto& keys = sections.at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) {
      std::vector<std::string> local;
      for (const auto& [k, s] : keys) local.push_back(k);
      std::string hint = suggestion(key, local);
      if (hint.empty()) {
        for (const auto& [other, other_keys] : sections) {
          if (other_keys.count(key) > 0) hint = "; it belongs in [" + other + "]";
        }
      }
      if (hint.empty()) hint = suggestion(key, all_keys);
      result.errors.push_back({line_no, qualified, "unknown key '" + key + "'" + hint});
      continue;
    }
    if (!seen.insert(qualified).second) {
      result.errors.push_back({line_no, qualified, "duplicate key"});
      continue;
    }
    if (qualified == "output.dir") output_dir_given = true;
    if (std::string msg = it->second(value, config); !msg.empty()) {
      result.errors.push_back({line_no, qualified, msg});
    }
  }

  for (const char* required : {"experiment.type", "experiment.measure", "experiment.seed"}) {
    if (seen.count(required) == 0) {
      const bool is_seed = std::string_view(required) == "experiment.seed";
      result.errors.push_back(
          {0, required, is_seed ? "missing seed; runs are never seeded from the clock" : "missing required key"});
    }
  }
  if (!result.errors.empty()) return result;

  if (!output_dir_given) config.output_dir = "out/" + std::string(experiment_name(config.experiment));
  if (seen.count("output.log_x") == 0) config.log_x = config.experiment == ExperimentKind::kThresholdSweep;
  for (const std::size_t count : config.counts) {
    for (const int n : config.dimensions) {
      if (count <= static_cast<std::size_t>(n)) {
        result.errors.push_back({0, "experiment.counts",
                                 "polytope size " + std::to_string(count) + " must exceed dimension " +
                                     std::to_string(n)});
      }
    }
  }
  if (config.budgets.test_points < 100 && (config.experiment == ExperimentKind::kThresholdSweep ||
                                            config.experiment == ExperimentKind::kBoundSandwich)) {
    result.errors.push_back({0, "budget.test_points", "must be at least 100 for membership estimates"});
  }
  if (config.experiment == ExperimentKind::kThresholdSweep) {
    for (std::size_t i = 1; i < config.counts.size(); ++i) {
      if (config.counts[i] <= config.counts[i - 1]) {
        result.errors.push_back({0, "experiment.counts", "must be increasing for threshold-sweep"});
        break;
      }
    }
  }
  if (result.errors.empty()) result.config = std::move(config);
  return result;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot read config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  ConfigParseResult parsed = parse_config(buffer.str());
  if (!parsed.ok()) {
    std::string msg = path + ": " + std::to_string(parsed.errors.size()) + " error(s)";
    for (const ConfigError& e : parsed.errors) msg += "\n  " + format_error(e);
    throw Error(Errc::kConfig, msg);
  }
  return std::move(*parsed.config);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string canonical_text(const ExperimentConfig& c) {
  std::ostringstream out;
  const Budgets& b = c.budgets;
  const Tolerances& t = c.tolerances;
  out << "experiment.type=" << experiment_name(c.experiment) << "\n"
      << "experiment.measure=" << kind_name(c.measure) << "\n"
      << "experiment.dimensions=" << join(c.dimensions) << "\n"
      << "experiment.seed=" << c.seed << "\n"
      << "experiment.counts=" << join(c.counts) << "\n"
      << "experiment.orders=" << join(c.orders) << "\n"
      << "experiment.deltas=" << join(c.deltas) << "\n"
      << "experiment.radii=" << join(c.radii) << "\n"
      << "budget.samples=" << b.samples << "\n"
      << "budget.reps=" << b.reps << "\n"
      << "budget.test_points=" << b.test_points << "\n"
      << "budget.net_size=" << b.net_size << "\n"
      << "budget.refine_iters=" << b.refine_iters << "\n"
      << "budget.mc_budget=" << b.mc_budget << "\n"
      << "budget.directions=" << b.directions << "\n"
      << "budget.kappa_samples=" << b.kappa_samples << "\n"
      << "budget.polytope_vertices=" << b.polytope_vertices << "\n"
      << "budget.polytopes=" << b.polytopes << "\n"
      << "budget.max_count=" << b.max_count << "\n"
      << "budget.seconds_per_point=" << (b.seconds_per_point ? format_double(*b.seconds_per_point) : "none") << "\n"
      << "tolerance.sigmas=" << format_double(t.sigmas) << "\n"
      << "tolerance.identity=" << format_double(t.identity) << "\n"
      << "tolerance.cramer=" << format_double(t.cramer) << "\n"
      << "tolerance.grunbaum=" << format_double(t.grunbaum) << "\n"
      << "tolerance.volume=" << format_double(t.volume) << "\n";
  // Output location and formats do not affect results and are left out.
  return out.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : bytes) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_text(config))));
  return buf;
}

}  // namespace depthlab
