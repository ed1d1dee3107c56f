#pragma once

// Small configs that keep every CLI command fast, plus file helpers.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "fixtures.hpp"
#include "nvcpt/io.hpp"

namespace fixtures {

namespace fs = std::filesystem;

inline std::string quick_config(const std::string& cmd) {
  if (cmd == "anglescan") return R"({"anglescan": {"step": 10}})";
  if (cmd == "rabi") return R"({"rabi": {"duration_us": 5, "amplitude": 0.2, "sample_us": 0.1}})";
  if (cmd == "odmr")
    return R"({"odmr": {"start": 2876.5, "stop": 2877.2, "step": 0.35, "sequence": [
      {"duration_us": 1, "laser": true, "tones": [], "record": "ref"},
      {"duration_us": 3, "laser": true, "tones": [{"target": "scan", "amplitude": 0.1}], "record": "signal"}]}})";
  if (cmd == "cpt") return R"({"cpt": {"window_us": 3, "probe_offsets": {"start": -0.15, "stop": 0.15, "step": 0.05}}})";
  if (cmd == "cpt2d")
    return R"({"cpt": {"window_us": 2},
      "cpt2d": {"pump_offsets": {"start": 0, "stop": 0.05, "step": 0.05},
                "probe_offsets": {"start": -0.05, "stop": 0.05, "step": 0.05}}})";
  return "{}";
}

inline void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Writes the two contrast fixture scans into dir; returns {two, single} paths.
inline std::pair<std::string, std::string> write_contrast_fixture(const fs::path& dir) {
  const ContrastScans s = reference_contrast();
  nvcpt::CsvWriter two({"probe_mhz", "signal"}), single({"probe_mhz", "signal"});
  for (size_t i = 0; i < s.grid.size(); ++i) {
    two.row(std::vector<double>{s.grid[i], s.two_tone[i]});
    single.row(std::vector<double>{s.grid[i], s.single_tone[i]});
  }
  fs::create_directories(dir);
  two.write((dir / "two_tone.csv").string());
  single.write((dir / "single_tone.csv").string());
  return {(dir / "two_tone.csv").string(), (dir / "single_tone.csv").string()};
}

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

inline Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "nvcpt");
  std::ostringstream o, e;
  Run r;
  r.code = nvcpt::cli::run_cli(args, o, e);
  r.out = o.str();
  r.err = e.str();
  return r;
}

}  // namespace fixtures
