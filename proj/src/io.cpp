#include "layoffcast/io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

#include "layoffcast/config.hpp"
#include "layoffcast/dataio.hpp"
#include "layoffcast/errors.hpp"

namespace layoffcast {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T number(const std::string& what, const std::string& text) {
  std::string v = trim(text);
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw FormatError("bad number '" + text + "' for " + what);
  return out;
}

double required(const KeyValues& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw FormatError("parameter file lacks '" + key + "'");
  return number<double>(key, it->second);
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw FormatError("expected key = value, got '" + t + "'");
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

std::string format_key_values(const KeyValues& kv) {
  std::ostringstream os;
  for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
  return os.str();
}

std::string format_params(const FullParams& p, const KeyValues& extra) {
  std::ostringstream os;
  os << "j0 = " << format_double(p.epidemic.j0) << '\n'
     << "k = " << format_double(p.epidemic.k) << '\n'
     << "n_pop = " << format_double(p.epidemic.n_pop) << '\n'
     << "delta = " << format_double(p.epidemic.delta) << '\n'
     << "alpha = " << format_double(p.obs.alpha) << '\n'
     << "beta = " << format_double(p.obs.beta) << '\n';
  os << format_key_values(extra);
  return os.str();
}

FullParams parse_params(const KeyValues& kv) {
  FullParams p;
  p.epidemic.j0 = required(kv, "j0");
  p.epidemic.k = required(kv, "k");
  p.epidemic.n_pop = required(kv, "n_pop");
  if (kv.count("delta")) p.epidemic.delta = required(kv, "delta");
  p.obs.alpha = required(kv, "alpha");
  p.obs.beta = required(kv, "beta");
  p.epidemic.validate();
  p.obs.validate();
  return p;
}

FullParams read_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return parse_params(parse_key_values(in));
}

std::string format_chain_csv(const PosteriorChain& chain) {
  std::ostringstream os;
  os << "# seed = " << chain.seed << '\n'
     << "# burn_in = " << chain.burn_in << '\n'
     << "# acceptance_rate = " << format_double(chain.acceptance_rate) << '\n'
     << "# baseline = " << format_double(chain.baseline) << '\n'
     << "# horizon = " << format_double(chain.horizon) << '\n';
  os << "draw,j0,k,n_pop,delta,alpha,beta,log_likelihood,t_end,censored\n";
  for (std::size_t d = 0; d < chain.size(); ++d) {
    const auto& p = chain.draws[d];
    os << d << ',' << format_double(p.epidemic.j0) << ',' << format_double(p.epidemic.k)
       << ',' << format_double(p.epidemic.n_pop) << ',' << format_double(p.epidemic.delta)
       << ',' << format_double(p.obs.alpha) << ',' << format_double(p.obs.beta) << ','
       << (d < chain.log_likelihood.size() ? format_double(chain.log_likelihood[d]) : "")
       << ',' << (d < chain.t_end_draws.size() ? std::to_string(chain.t_end_draws[d]) : "")
       << ',' << (d < chain.censored.size() ? std::to_string(chain.censored[d]) : "") << '\n';
  }
  return os.str();
}

PosteriorChain parse_chain_csv(std::istream& in) {
  PosteriorChain chain;
  std::string line;
  bool header_seen = false;
  bool have_t_end = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      auto eq = t.find('=');
      if (eq == std::string::npos) continue;
      std::string key = trim(t.substr(1, eq - 1));
      std::string val = trim(t.substr(eq + 1));
      if (key == "seed") chain.seed = number<std::uint64_t>(key, val);
      else if (key == "burn_in") chain.burn_in = number<int>(key, val);
      else if (key == "acceptance_rate") chain.acceptance_rate = number<double>(key, val);
      else if (key == "baseline") chain.baseline = number<double>(key, val);
      else if (key == "horizon") chain.horizon = number<double>(key, val);
      continue;
    }
    if (!header_seen) {
      if (t.rfind("draw,", 0) != 0) throw FormatError("chain file lacks its header row");
      header_seen = true;
      continue;
    }
    auto f = split_csv_line(t);
    if (f.size() != 10) {
      throw FormatError("chain line " + std::to_string(lineno) + ": expected 10 fields");
    }
    FullParams p;
    p.epidemic.j0 = number<double>("j0", f[1]);
    p.epidemic.k = number<double>("k", f[2]);
    p.epidemic.n_pop = number<double>("n_pop", f[3]);
    p.epidemic.delta = number<double>("delta", f[4]);
    p.obs.alpha = number<double>("alpha", f[5]);
    p.obs.beta = number<double>("beta", f[6]);
    chain.draws.push_back(p);
    chain.log_likelihood.push_back(trim(f[7]).empty() ? kLogZero : number<double>("log_likelihood", f[7]));
    if (trim(f[8]).empty()) {
      have_t_end = false;
    } else {
      chain.t_end_draws.push_back(number<int>("t_end", f[8]));
      chain.censored.push_back(static_cast<std::uint8_t>(number<int>("censored", f[9])));
    }
  }
  if (!header_seen) throw FormatError("chain file lacks its header row");
  if (!have_t_end) {
    chain.t_end_draws.clear();
    chain.censored.clear();
  }
  return chain;
}

PosteriorChain read_chain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return parse_chain_csv(in);
}

}  // namespace layoffcast
