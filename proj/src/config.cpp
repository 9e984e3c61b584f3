#include "layoffcast/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "layoffcast/errors.hpp"

namespace layoffcast {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw FormatError("invalid value '" + value + "' for config key '" + key + "'");
}

template <typename T>
T to_number(const std::string& key, const std::string& value) {
  std::string v = trim(value);
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, value);
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  std::string v = trim(value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, value);
}

FullParams& init_of(RunConfig& cfg) {
  if (!cfg.init) cfg.init = FullParams{};
  return *cfg.init;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = to_number<std::uint64_t>(k, v); }},
      {"iterations", [](RunConfig& c, const std::string& k, const std::string& v) { c.iterations = to_number<int>(k, v); }},
      {"burn_in", [](RunConfig& c, const std::string& k, const std::string& v) { c.burn_in = to_number<int>(k, v); }},
      {"dt", [](RunConfig& c, const std::string& k, const std::string& v) { c.dt = to_number<double>(k, v); }},
      {"horizon", [](RunConfig& c, const std::string& k, const std::string& v) { c.horizon = to_number<double>(k, v); }},
      {"baseline", [](RunConfig& c, const std::string& k, const std::string& v) {
         if (trim(v).empty()) c.baseline_override.reset();
         else c.baseline_override = to_number<double>(k, v);
       }},
      {"prior_j0_lo", [](RunConfig& c, const std::string& k, const std::string& v) { c.priors.j0_lo = to_number<double>(k, v); }},
      {"prior_j0_hi", [](RunConfig& c, const std::string& k, const std::string& v) { c.priors.j0_hi = to_number<double>(k, v); }},
      {"prior_k_lo", [](RunConfig& c, const std::string& k, const std::string& v) { c.priors.k_lo = to_number<double>(k, v); }},
      {"prior_k_hi", [](RunConfig& c, const std::string& k, const std::string& v) { c.priors.k_hi = to_number<double>(k, v); }},
      {"prior_n_lo", [](RunConfig& c, const std::string& k, const std::string& v) { c.priors.n_lo = to_number<double>(k, v); }},
      {"prior_n_hi", [](RunConfig& c, const std::string& k, const std::string& v) { c.priors.n_hi = to_number<double>(k, v); }},
      {"prior_alpha_lo", [](RunConfig& c, const std::string& k, const std::string& v) { c.priors.alpha_lo = to_number<double>(k, v); }},
      {"prior_alpha_hi", [](RunConfig& c, const std::string& k, const std::string& v) { c.priors.alpha_hi = to_number<double>(k, v); }},
      {"prior_beta_lo", [](RunConfig& c, const std::string& k, const std::string& v) { c.priors.beta_lo = to_number<double>(k, v); }},
      {"prior_beta_hi", [](RunConfig& c, const std::string& k, const std::string& v) { c.priors.beta_hi = to_number<double>(k, v); }},
      {"variant", [](RunConfig& c, const std::string&, const std::string& v) { c.variant = parse_variant(trim(v)); }},
      {"level", [](RunConfig& c, const std::string& k, const std::string& v) { c.level = to_number<double>(k, v); }},
      {"from_week", [](RunConfig& c, const std::string& k, const std::string& v) { c.from_week = to_number<int>(k, v); }},
      {"to_week", [](RunConfig& c, const std::string& k, const std::string& v) {
         if (trim(v).empty()) c.to_week.reset();
         else c.to_week = to_number<int>(k, v);
       }},
      {"count_mode", [](RunConfig& c, const std::string& k, const std::string& v) {
         std::string t = trim(v);
         if (t == "per_event") c.count_mode = CountMode::per_event;
         else if (t == "per_company_week") c.count_mode = CountMode::per_company_week;
         else bad_value(k, v);
       }},
      {"init_j0", [](RunConfig& c, const std::string& k, const std::string& v) { init_of(c).epidemic.j0 = to_number<double>(k, v); }},
      {"init_k", [](RunConfig& c, const std::string& k, const std::string& v) { init_of(c).epidemic.k = to_number<double>(k, v); }},
      {"init_n", [](RunConfig& c, const std::string& k, const std::string& v) { init_of(c).epidemic.n_pop = to_number<double>(k, v); }},
      {"init_delta", [](RunConfig& c, const std::string& k, const std::string& v) { init_of(c).epidemic.delta = to_number<double>(k, v); }},
      {"init_alpha", [](RunConfig& c, const std::string& k, const std::string& v) { init_of(c).obs.alpha = to_number<double>(k, v); }},
      {"init_beta", [](RunConfig& c, const std::string& k, const std::string& v) { init_of(c).obs.beta = to_number<double>(k, v); }},
      {"no_optimize", [](RunConfig& c, const std::string& k, const std::string& v) { c.no_optimize = to_bool(k, v); }},
      {"n_sims", [](RunConfig& c, const std::string& k, const std::string& v) { c.n_sims = to_number<int>(k, v); }},
      {"sim_weeks", [](RunConfig& c, const std::string& k, const std::string& v) {
         if (trim(v).empty()) c.sim_weeks.reset();
         else c.sim_weeks = to_number<int>(k, v);
       }},
      {"cutoffs", [](RunConfig& c, const std::string&, const std::string& v) { c.cutoffs = parse_cutoffs(trim(v)); }},
      {"threads", [](RunConfig& c, const std::string& k, const std::string& v) { c.threads = to_number<int>(k, v); }},
      {"input", [](RunConfig& c, const std::string&, const std::string& v) { c.input = trim(v); }},
      {"series", [](RunConfig& c, const std::string&, const std::string& v) { c.series = trim(v); }},
      {"params", [](RunConfig& c, const std::string&, const std::string& v) { c.params = trim(v); }},
      {"chain", [](RunConfig& c, const std::string&, const std::string& v) { c.chain = trim(v); }},
      {"out_dir", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = trim(v); }},
  };
  return table;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto it = setters().find(key);
  if (it == setters().end()) throw FormatError("unknown config key '" + key + "'");
  it->second(cfg, key, value);
}

std::vector<int> parse_cutoffs(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (part.empty()) continue;
    auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_number<int>("cutoffs", part));
      continue;
    }
    int a = to_number<int>("cutoffs", part.substr(0, dots));
    int b = to_number<int>("cutoffs", part.substr(dots + 2));
    if (a > b) throw FormatError("cutoff range '" + part + "' is decreasing");
    for (int c = a; c <= b; ++c) out.push_back(c);
  }
  return out;
}

std::string format_cutoffs(const std::vector<int>& cutoffs) {
  std::string out;
  for (std::size_t k = 0; k < cutoffs.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(cutoffs[k]);
  }
  return out;
}

namespace {

void merge_stream(RunConfig& cfg, std::istream& in, const std::string& name) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw FormatError(name + ":" + std::to_string(lineno) + ": expected key = value");
    apply_setting(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  merge_stream(cfg, in, "config");
  return cfg;
}

void merge_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  merge_stream(cfg, in, path);
}

RunConfig load_config_file(const std::string& path) {
  RunConfig cfg;
  merge_config_file(cfg, path);
  return cfg;
}

void apply_environment(RunConfig& cfg) {
  for (const auto& [key, setter] : setters()) {
    std::string name = kEnvPrefix;
    for (char ch : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (const char* v = std::getenv(name.c_str())) setter(cfg, key, v);
  }
}

std::string write_config(const RunConfig& c) {
  std::ostringstream os;
  auto kv = [&](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
  kv("seed", std::to_string(c.seed));
  kv("iterations", std::to_string(c.iterations));
  kv("burn_in", std::to_string(c.burn_in));
  kv("dt", format_double(c.dt));
  kv("horizon", format_double(c.horizon));
  kv("baseline", c.baseline_override ? format_double(*c.baseline_override) : "");
  kv("prior_j0_lo", format_double(c.priors.j0_lo));
  kv("prior_j0_hi", format_double(c.priors.j0_hi));
  kv("prior_k_lo", format_double(c.priors.k_lo));
  kv("prior_k_hi", format_double(c.priors.k_hi));
  kv("prior_n_lo", format_double(c.priors.n_lo));
  kv("prior_n_hi", format_double(c.priors.n_hi));
  kv("prior_alpha_lo", format_double(c.priors.alpha_lo));
  kv("prior_alpha_hi", format_double(c.priors.alpha_hi));
  kv("prior_beta_lo", format_double(c.priors.beta_lo));
  kv("prior_beta_hi", format_double(c.priors.beta_hi));
  kv("variant", std::string(variant_name(c.variant)));
  kv("level", format_double(c.level));
  kv("from_week", std::to_string(c.from_week));
  kv("to_week", c.to_week ? std::to_string(*c.to_week) : "");
  kv("count_mode", c.count_mode == CountMode::per_event ? "per_event" : "per_company_week");
  if (c.init) {
    kv("init_j0", format_double(c.init->epidemic.j0));
    kv("init_k", format_double(c.init->epidemic.k));
    kv("init_n", format_double(c.init->epidemic.n_pop));
    kv("init_delta", format_double(c.init->epidemic.delta));
    kv("init_alpha", format_double(c.init->obs.alpha));
    kv("init_beta", format_double(c.init->obs.beta));
  }
  kv("no_optimize", c.no_optimize ? "true" : "false");
  kv("n_sims", std::to_string(c.n_sims));
  kv("sim_weeks", c.sim_weeks ? std::to_string(*c.sim_weeks) : "");
  kv("cutoffs", format_cutoffs(c.cutoffs));
  kv("threads", std::to_string(c.threads));
  kv("input", c.input);
  kv("series", c.series);
  kv("params", c.params);
  kv("chain", c.chain);
  kv("out_dir", c.out_dir);
  return os.str();
}

}  // namespace layoffcast
