#include "cavflow/io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace cavflow {

using nlohmann::json;

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open config file: " + path);

  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::domain_error("config parse error: " + std::string(e.what()));
  }

  RunConfig rc;
  try {
    rc.config.R0 = doc.value("R0", 1.0);
    if (!doc.contains("cavities") || !doc["cavities"].is_array() ||
        doc["cavities"].empty())
      throw std::domain_error("config needs a non-empty 'cavities' array");
    for (const json& c : doc["cavities"]) {
      const auto& a = c.at("a");
      if (!a.is_array() || a.size() != 2)
        throw std::domain_error("cavity 'a' must be [x, y]");
      rc.config.centers.push_back({a[0].get<double>(), a[1].get<double>()});
      rc.config.areas.push_back(c.at("v").get<double>());
    }
    if (doc.contains("knobs")) {
      const json& k = doc["knobs"];
      rc.knobs.modes = k.value("modes", rc.knobs.modes);
      rc.knobs.steps = k.value("steps", rc.knobs.steps);
      rc.knobs.checkpoints = k.value("checkpoints", rc.knobs.checkpoints);
      rc.knobs.time_grid = k.value("time_grid", rc.knobs.time_grid);
      rc.knobs.grid = k.value("grid", rc.knobs.grid);
      rc.knobs.alpha = k.value("alpha", rc.knobs.alpha);
      rc.knobs.threads = k.value("threads", rc.knobs.threads);
      if (k.contains("eps_ladder"))
        rc.knobs.eps_ladder = k["eps_ladder"].get<std::vector<double>>();
    }
  } catch (const json::exception& e) {
    throw std::domain_error("config field error: " + std::string(e.what()));
  }

  rc.config.validate();
  return rc;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : out_(path), width_(header.size()) {
  if (!out_) throw std::domain_error("cannot open output file: " + path);
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_)
    throw std::logic_error("csv row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

}  // namespace cavflow
