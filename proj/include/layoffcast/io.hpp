#pragma once
// File forms of fitted parameters and posterior chains, plus atomic writes.

#include <iosfwd>
#include <map>
#include <string>

#include "layoffcast/inference.hpp"

namespace layoffcast {

// Writes `content` to `path` via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Flat `key = value` document.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(std::istream& in);
std::string format_key_values(const KeyValues& kv);

// Parameter file: j0, k, n_pop, delta, alpha, beta plus optional extras
// (log_likelihood, evaluations, ...).
std::string format_params(const FullParams& p, const KeyValues& extra = {});
FullParams parse_params(const KeyValues& kv);
FullParams read_params_file(const std::string& path);

// Chain CSV: draw,j0,k,n_pop,delta,alpha,beta,log_likelihood,t_end,censored.
// Header comments carry seed, burn-in, acceptance rate, baseline and horizon.
std::string format_chain_csv(const PosteriorChain& chain);
PosteriorChain parse_chain_csv(std::istream& in);
PosteriorChain read_chain_file(const std::string& path);

}  // namespace layoffcast
