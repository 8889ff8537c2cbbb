#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lightcone/expansion.hpp"

namespace lce {

struct Chord {
  FourVector x, y;
};

struct OutputSpec {
  std::string dir = "out";
  bool csv = false;       // evaluate_numeric samples along each chord
  int lambda_grid = 11;   // samples y(l) = x + l (y - x), l in (0, 1]
};

struct VerifySettings {
  std::uint64_t seed = 1;
  int random_configs = 6;
  int texp_chords = 50;
};

struct RunConfig {
  ChiralConfig cfg;
  std::vector<Chord> chords;
  std::vector<Side> sides{Side::L, Side::R};
  std::vector<KernelFamily> families{KernelFamily::p};
  bool first_order = true;
  bool mass2 = false;
  QuadratureSpec quadrature;
  OutputSpec output;
  VerifySettings verify;
};

// Throws ConfigError with "<origin>:<line>:<col>: <field>: <message>".
RunConfig parse_run_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_run_config(const std::string& path);

}  // namespace lce
