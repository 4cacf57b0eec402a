// tvdd: denoise a PGM image with a domain-decomposition TV solver.
//
//   tvdd --input clean.pgm --method fpj --subdomains 8x8 --trace-csv trace.csv
//   tvdd synth --rows 512 --cols 512 --output clean.pgm
//   tvdd decay --input clean.pgm --methods rj,pj,fpj,gs --outer-max 500 --output decay.csv
//
// Exit status: 0 success, 1 usage error, 2 I/O error, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tvdd/errors.hpp"
#include "tvdd/experiment.hpp"
#include "tvdd/noise.hpp"
#include "tvdd/pgm.hpp"
#include "tvdd/synthetic.hpp"

using namespace tvdd;

namespace {

void parse_subdomains(const std::string& text, int& rows, int& cols) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw InvalidArgument("");
    std::size_t used = 0;
    rows = std::stoi(text.substr(0, x), &used);
    if (used != x) throw InvalidArgument("");
    cols = std::stoi(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) throw InvalidArgument("");
  } catch (const std::exception&) {
    throw InvalidArgument("--subdomains expects MsxNs, e.g. 8x8, got '" + text + "'");
  }
}

Method to_method(const std::string& name) {
  const auto m = parse_method(name);
  if (!m) throw InvalidArgument("unknown method '" + name + "' (rj, pj, fpj, gs, fista)");
  return *m;
}

Shape to_shape(const std::string& name) {
  if (name == "window") return Shape::Window;
  if (name == "stripe") return Shape::Stripe;
  throw InvalidArgument("unknown shape '" + name + "' (window, stripe)");
}

// Options shared by the default command and `decay`.
struct Common {
  std::string input;
  double alpha = 10.0;
  std::string subdomains = "8x8";
  std::string shape = "window";
  double noise_var = 0.05;
  std::uint64_t seed = 0;
  double inner_tol = 1e-4;
  int inner_max = 50;
  int oracle_iters = 100000;
  std::string oracle_cache;
  int threads = 1;

  void add_to(CLI::App& app) {
    app.add_option("--input", input, "clean reference image (PGM)")->required();
    app.add_option("--alpha", alpha, "fidelity weight")->capture_default_str();
    app.add_option("--subdomains", subdomains, "subdomain grid MsxNs")->capture_default_str();
    app.add_option("--shape", shape, "window or stripe")->capture_default_str();
    app.add_option("--noise-var", noise_var, "variance of the added Gaussian noise")->capture_default_str();
    app.add_option("--seed", seed, "noise seed")->capture_default_str();
    app.add_option("--inner-tol", inner_tol, "relative change of div_s for the local solves")->capture_default_str();
    app.add_option("--inner-max", inner_max, "local iteration cap")->capture_default_str();
    app.add_option("--oracle-iters", oracle_iters, "full-grid FISTA steps for F(p*); 0 disables")
        ->capture_default_str();
    app.add_option("--oracle-cache", oracle_cache, "directory for cached reference solutions");
    app.add_option("--threads", threads, "worker threads")->capture_default_str();
  }

  ExperimentSpec spec() const {
    ExperimentSpec s;
    s.input_path = input;
    s.alpha = alpha;
    parse_subdomains(subdomains, s.block_rows, s.block_cols);
    s.shape = to_shape(shape);
    s.noise_variance = noise_var;
    s.seed = seed;
    s.inner = {inner_tol, inner_max};
    s.oracle_iters = oracle_iters;
    s.oracle_cache_dir = oracle_cache;
    s.threads = threads;
    return s;
  }
};

int run_denoise(const Common& common, const std::string& method, const std::string& output, double outer_tol,
                int outer_max, const std::string& trace_csv, const std::string& report, bool no_timing) {
  ExperimentSpec spec = common.spec();
  spec.method = to_method(method);
  spec.output_path = output;
  spec.outer_tol = outer_tol;
  spec.outer_max = outer_max;
  spec.trace_csv_path = trace_csv;
  spec.report_path = report;
  spec.trace_timing = !no_timing;
  const ExperimentReport r = run_experiment(spec);

  std::printf("method      %s\n", std::string(method_name(r.method)).c_str());
  std::printf("grid        %dx%d, subdomains %dx%d (%s), colors %d\n", r.grid.rows, r.grid.cols, r.block_rows,
              r.block_cols, std::string(shape_name(r.shape)).c_str(), r.color_count);
  std::printf("alpha       %g\n", r.alpha);
  std::printf("iterations  %d (%s)\n", r.outer_iterations, r.converged ? "converged" : "not converged");
  if (r.final_relative_gap) std::printf("rel. gap    %.3e\n", *r.final_relative_gap);
  std::printf("PSNR        %.2f dB (noisy %.2f dB)\n", r.psnr, r.noisy_psnr);
  std::printf("wall        %.1f ms\n", r.wall_ms);
  return 0;
}

int run_synth(int rows, int cols, const std::string& output, bool plain) {
  write_pgm(make_synthetic_image(rows, cols), output, plain ? PgmEncoding::Plain : PgmEncoding::Raw);
  return 0;
}

int run_decay(const Common& common, const std::string& methods, int outer_max, const std::string& output) {
  const ExperimentSpec spec = common.spec();
  spec.validate();
  if (spec.oracle_iters <= 0) throw InvalidArgument("decay needs an oracle (--oracle-iters > 0)");
  const Image clean = read_pgm(spec.input_path);
  const Decomposition dec(clean.size(), spec.block_rows, spec.block_cols, spec.shape);
  const RofProblem problem(add_gaussian_noise(clean, spec.noise_variance, spec.seed), spec.alpha);
  const Oracle oracle = compute_oracle(problem, spec.oracle_iters, spec.oracle_cache_dir);

  std::vector<SolveResult> results;
  std::vector<BoundReport> bounds;
  std::vector<std::string> labels;
  std::stringstream list(methods);
  for (std::string name; std::getline(list, name, ',');) {
    SolverConfig cfg;
    cfg.method = to_method(name);
    cfg.stop = OuterStop::IterationLimit;
    cfg.max_outer = outer_max;
    cfg.inner = spec.inner;
    cfg.oracle_energy = oracle.energy;
    cfg.threads = spec.threads;
    results.push_back(solve(problem, dec, cfg));
    bounds.push_back(evaluate_bounds(results.back().trace, dec, problem, DualField(clean.size()), oracle.p));
    labels.push_back(name);
    std::fprintf(stderr, "%s: %d iterations, final gap %.3e, %d bound violations\n", name.c_str(),
                 results.back().trace.size(),
                 results.back().trace.size() ? results.back().trace.iterations.back().relative_gap : 0.0,
                 bounds.back().violations);
  }
  std::vector<LabeledTrace> rows;
  for (std::size_t k = 0; k < results.size(); ++k) rows.push_back({labels[k], &results[k].trace, &bounds[k]});

  if (output.empty() || output == "-") {
    write_decay_csv(std::cout, rows, oracle.energy);
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) throw IoError("cannot open " + output + " for writing");
    write_decay_csv(out, rows, oracle.energy);
    if (!out) throw IoError("failed writing " + output);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Total-variation denoising with nonoverlapping domain decomposition"};
  app.require_subcommand(0, 1);

  Common common;
  std::string method = "fpj";
  std::string output;
  double outer_tol = 1e-5;
  int outer_max = 1000;
  std::string trace_csv;
  std::string report;
  bool no_timing = false;
  common.add_to(app);
  app.add_option("--method", method, "rj, pj, fpj, gs or fista")->capture_default_str();
  app.add_option("--output", output, "denoised image (PGM)");
  app.add_option("--outer-tol", outer_tol, "outer stopping threshold")->capture_default_str();
  app.add_option("--outer-max", outer_max, "outer iteration cap")->capture_default_str();
  app.add_option("--trace-csv", trace_csv, "per-iteration trace");
  app.add_option("--report", report, "JSON summary");
  app.add_flag("--no-timing", no_timing, "leave wall_ms out of the trace so it is reproducible byte for byte");

  CLI::App* synth = app.add_subcommand("synth", "write the synthetic test image");
  int rows = 512;
  int cols = 512;
  std::string synth_out;
  bool plain = false;
  synth->add_option("--rows", rows)->capture_default_str();
  synth->add_option("--cols", cols)->capture_default_str();
  synth->add_option("--output", synth_out)->required();
  synth->add_flag("--plain", plain, "ASCII (P2) instead of binary (P5)");

  CLI::App* decay = app.add_subcommand("decay", "energy decay of several methods with their bounds, as CSV");
  Common decay_common;
  std::string methods = "rj,pj,fpj,gs";
  int decay_max = 500;
  std::string decay_out;
  decay_common.add_to(*decay);
  decay->add_option("--methods", methods, "comma-separated methods")->capture_default_str();
  decay->add_option("--outer-max", decay_max)->capture_default_str();
  decay->add_option("--output", decay_out, "CSV path, '-' for stdout");

  // The default command's --input is only required without a subcommand.
  app.get_option("--input")->required(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth) return run_synth(rows, cols, synth_out, plain);
    if (*decay) return run_decay(decay_common, methods, decay_max, decay_out);
    if (common.input.empty()) {
      std::cerr << "--input is required\n" << app.help();
      return 1;
    }
    return run_denoise(common, method, output, outer_tol, outer_max, trace_csv, report, no_timing);
  } catch (const InvalidArgument& e) {
    std::cerr << "tvdd: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    std::cerr << "tvdd: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "tvdd: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "tvdd: " << e.what() << '\n';
    return 2;
  }
}
