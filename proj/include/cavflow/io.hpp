#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "cavflow/geometry.hpp"

namespace cavflow {

struct RunKnobs {
  int modes = 16;
  int steps = 128;
  int checkpoints = 8;
  int time_grid = 64;
  int grid = 50;  // polar resolution, radial = angular
  std::vector<double> eps_ladder;  // empty: 2^{-k} R0, k = 7..10
  double alpha = 0.5;
  int threads = 1;
};

struct RunConfig {
  Configuration config;
  RunKnobs knobs;
};

// JSON layout: {"R0": 1.0, "cavities": [{"a": [x, y], "v": area}, ...],
//               "knobs": {optional overrides}}
// throws std::domain_error with a descriptive message on malformed input
RunConfig load_run_config(const std::string& path);

// shortest round-trip decimal form
std::string format_g17(double v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t width_;
};

}  // namespace cavflow
