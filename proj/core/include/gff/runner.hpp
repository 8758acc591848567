#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gff/config.hpp"

namespace gff {

// Record of one run: everything needed to reproduce it plus the list of
// files it wrote. CSV/SVG artifacts are bit-identical across reruns with the
// same config in single-thread mode; the manifest itself carries timing.
struct RunManifest {
  std::string experiment;
  std::string version;
  std::string config_echo;  // canonical serialized config
  std::uint64_t seed = 0;
  int threads = 1;
  double wall_seconds = 0.0;
  int exit_code = 0;  // 0 ok, 3 statistical gate rejected (verify experiments)
  std::vector<std::string> artifacts;  // paths relative to the out directory
  std::vector<std::pair<std::string, std::uint64_t>> streams;  // tag -> base key

  std::string to_json() const;
};

// Dispatches the configured experiment, writes its artifacts under
// config.out (created if missing), writes manifest.json last, and returns
// the manifest. Throws on validation/resource/numerical errors.
RunManifest run_experiment(const RunConfig& config);

}  // namespace gff
