#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>

#include "lightcone/mass2.hpp"
#include "lightcone/run_config.hpp"
#include "lightcone/serialize.hpp"
#include "lightcone/verify.hpp"

namespace fs = std::filesystem;
using namespace lce;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Job {
  std::size_t chord;
  Side side;
  KernelFamily family;
};

std::string family_name(KernelFamily f) { return f == KernelFamily::p ? "p" : "k"; }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// Evaluates every (chord, side, family) and writes expansions.jsonl plus the
// optional CSV. Jobs run concurrently; records are written in job order.
int run(const RunConfig& rc, int jobs) {
  if (rc.chords.empty()) {
    std::cerr << "error: config has no chords\n";
    return kExitConfig;
  }
  fs::create_directories(rc.output.dir);
  std::vector<Job> work;
  for (std::size_t c = 0; c < rc.chords.size(); ++c)
    for (Side s : rc.sides)
      for (KernelFamily f : rc.families) work.push_back({c, s, f});

  std::vector<std::vector<ExpansionResult>> results(work.size());
  std::vector<std::string> csv(work.size());
  std::string failure;
  std::mutex mu;
  QuadratureSpec spec = rc.quadrature;
  spec.parallel = jobs <= 1;

#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
  for (std::size_t i = 0; i < work.size(); ++i) {
    const Job& jb = work[i];
    const Chord& ch = rc.chords[jb.chord];
    try {
      if (rc.first_order) results[i].push_back(chiral_expansion(rc.cfg, ch.x, ch.y, jb.side, jb.family, spec));
      if (rc.mass2) results[i].push_back(mass2_expansion(rc.cfg, ch.x, ch.y, jb.side, jb.family, spec));
      if (rc.output.csv && rc.first_order) {
        std::ostringstream os;
        for (int g = 1; g <= rc.output.lambda_grid; ++g) {
          const double lam = static_cast<double>(g) / rc.output.lambda_grid;
          const FourVector yl = chord_point(ch.x, ch.y, lam);
          const FourVector xi = yl - ch.x;
          if (causal_class_relative(xi) == CausalClass::lightlike) continue;
          const BlockMatrix v = evaluate_numeric(chiral_expansion(rc.cfg, ch.x, yl, jb.side, jb.family, spec));
          const cplx tr = v.trace();
          os << jb.chord << ',' << to_string(jb.side) << ',' << family_name(jb.family) << ',' << fmt(lam)
             << ',' << fmt(minkowski_square(xi)) << ',' << fmt(tr.real()) << ',' << fmt(tr.imag()) << ','
             << fmt(max_abs(v)) << '\n';
        }
        csv[i] = os.str();
      }
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(mu);
      if (failure.empty())
        failure = "chord " + std::to_string(jb.chord) + " side " + to_string(jb.side) + " family " +
                  family_name(jb.family) + ": " + e.what();
    }
  }
  if (!failure.empty()) {
    std::cerr << "numerical failure: " << failure << "\n";
    return kExitNumeric;
  }
  std::ofstream out(fs::path(rc.output.dir) / "expansions.jsonl");
  for (const auto& rs : results)
    for (const auto& r : rs) out << to_json_line(r) << '\n';
  if (rc.output.csv) {
    std::ofstream c(fs::path(rc.output.dir) / "samples.csv");
    c << "chord,side,family,lambda,xi2,trace_re,trace_im,max_abs\n";
    for (const auto& s : csv) c << s;
  }
  std::cout << "wrote " << (fs::path(rc.output.dir) / "expansions.jsonl").string() << "\n";
  return 0;
}

int verify(const RunConfig& rc) {
  fs::create_directories(rc.output.dir);
  const VerifyReport report = run_verification(rc);
  std::ofstream(fs::path(rc.output.dir) / "report.json") << report.to_json().dump(2) << '\n';
  for (const auto& c : report.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.group << "/" << c.name << " = " << c.value
              << " (threshold " << c.threshold << ")\n";
  std::cout << "verification took " << report.seconds << " s\n";
  return report.all_pass() ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Light-cone expansion of chiral Dirac sea perturbations"};
  app.require_subcommand(1);
  std::string config_path;
  double tol = 0.0;
  std::string out_dir;
  long long seed = -1;
  int jobs = 1;
  for (CLI::App* sub : {app.add_subcommand("run", "evaluate expansions along the configured chords"),
                        app.add_subcommand("verify", "run the verification suite")}) {
    sub->add_option("config", config_path, "YAML run configuration")->required();
    sub->add_option("--tol", tol, "relative quadrature tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed for randomized verification fields")->check(CLI::NonNegativeNumber);
    sub->add_option("--jobs", jobs, "concurrent chord evaluations")->check(CLI::PositiveNumber);
  }
  CLI11_PARSE(app, argc, argv);

  RunConfig rc;
  try {
    rc = load_run_config(config_path);
    if (tol > 0.0) {
      rc.quadrature.rel_tol = tol;
      rc.quadrature.validate();
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }
  if (!out_dir.empty()) rc.output.dir = out_dir;
  if (seed >= 0) rc.verify.seed = static_cast<std::uint64_t>(seed);
  try {
    if (app.got_subcommand("run")) return run(rc, jobs);
    return verify(rc);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  }
}
