// Flat key = value run configuration.
//
//   # comment
//   grid.n = 64
//   params.tau = 0.5
//   forcing.modes[0] = 1 0 0.5 0 cosine 2.0
//
// Keys: grid.{n,l}; params.<name> for each Params field; ic.{kind,seed,kmax,
// amplitude,decay,path}; forcing.modes[i] = "m1 m2 re im law [rate]" with law
// in {constant, cosine, ramp}; stepper.{dt,t_end,cfl,adapt,kmax};
// output.{every,dir}. Unknown and repeated keys are errors.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "frsm/stepper.hpp"

namespace frsm {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Parses configuration text. Informational messages (e.g. about keys that
/// are accepted but inert) are appended to `notes` when given.
RunConfig parse_config(std::string_view text, std::vector<std::string>* notes = nullptr);
RunConfig load_config(const std::string& path, std::vector<std::string>* notes = nullptr);

/// Writes every key; parse_config(format_config(c)) reproduces c.
std::string format_config(const RunConfig& cfg);

}  // namespace frsm
