#include "tvdd/experiment.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "tvdd/errors.hpp"
#include "tvdd/noise.hpp"
#include "tvdd/pgm.hpp"

namespace tvdd {
namespace {

constexpr char kOracleMagic[8] = {'T', 'V', 'D', 'D', 'O', 'R', 'C', '1'};

class Fnv1a {
 public:
  void add_bytes(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < size; ++k) {
      hash_ ^= bytes[k];
      hash_ *= 0x100000001b3ULL;
    }
  }
  template <class T>
  void add(const T& value) {
    add_bytes(&value, sizeof(T));
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

std::filesystem::path oracle_cache_path(const RofProblem& problem, int iterations, const std::string& dir) {
  Fnv1a h;
  h.add(problem.size().rows);
  h.add(problem.size().cols);
  h.add(std::bit_cast<std::uint64_t>(problem.alpha()));
  h.add(iterations);
  for (double v : problem.data().values()) h.add(std::bit_cast<std::uint64_t>(v));
  char name[64];
  std::snprintf(name, sizeof(name), "oracle-%016llx.bin", static_cast<unsigned long long>(h.value()));
  return std::filesystem::path(dir) / name;
}

std::optional<Oracle> load_oracle(const std::filesystem::path& path, const RofProblem& problem, int iterations) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  std::int32_t rows = 0;
  std::int32_t cols = 0;
  std::int32_t iters = 0;
  double alpha = 0.0;
  double energy = 0.0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  in.read(reinterpret_cast<char*>(&iters), sizeof iters);
  in.read(reinterpret_cast<char*>(&alpha), sizeof alpha);
  in.read(reinterpret_cast<char*>(&energy), sizeof energy);
  if (!in || std::memcmp(magic, kOracleMagic, 8) != 0 || rows != problem.size().rows ||
      cols != problem.size().cols || iters != iterations || alpha != problem.alpha()) {
    return std::nullopt;
  }
  Oracle oracle;
  oracle.p = DualField(rows, cols);
  in.read(reinterpret_cast<char*>(oracle.p.down_values().data()),
          static_cast<std::streamsize>(oracle.p.down_values().size_bytes()));
  in.read(reinterpret_cast<char*>(oracle.p.right_values().data()),
          static_cast<std::streamsize>(oracle.p.right_values().size_bytes()));
  if (!in) return std::nullopt;
  oracle.energy = energy;
  oracle.iterations = iterations;
  oracle.from_cache = true;
  return oracle;
}

void store_oracle(const std::filesystem::path& path, const Oracle& oracle, double alpha) {
  std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write oracle cache " + tmp.string());
    const std::int32_t rows = oracle.p.rows();
    const std::int32_t cols = oracle.p.cols();
    const std::int32_t iters = oracle.iterations;
    out.write(kOracleMagic, 8);
    out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
    out.write(reinterpret_cast<const char*>(&iters), sizeof iters);
    out.write(reinterpret_cast<const char*>(&alpha), sizeof alpha);
    out.write(reinterpret_cast<const char*>(&oracle.energy), sizeof oracle.energy);
    out.write(reinterpret_cast<const char*>(oracle.p.down_values().data()),
              static_cast<std::streamsize>(oracle.p.down_values().size_bytes()));
    out.write(reinterpret_cast<const char*>(oracle.p.right_values().data()),
              static_cast<std::streamsize>(oracle.p.right_values().size_bytes()));
    if (!out) throw IoError("failed writing oracle cache " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_text_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  body(out);
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace

void ExperimentSpec::validate() const {
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  if (!(noise_variance >= 0.0)) throw InvalidArgument("noise variance must be nonnegative");
  if (oracle_iters < 0) throw InvalidArgument("oracle iterations must be nonnegative");
  if (threads < 1) throw InvalidArgument("thread count must be at least 1");
  if (!(outer_tol > 0.0)) throw InvalidArgument("outer tolerance must be positive");
  if (outer_max < 0) throw InvalidArgument("outer iteration cap must be nonnegative");
  inner.validate();
}

Oracle compute_oracle(const RofProblem& problem, int iterations, const std::string& cache_dir) {
  std::filesystem::path path;
  if (!cache_dir.empty()) {
    path = oracle_cache_path(problem, iterations, cache_dir);
    if (auto cached = load_oracle(path, problem, iterations)) return std::move(*cached);
  }
  Oracle oracle;
  oracle.p = fista_reference(problem, iterations);
  oracle.energy = dual_energy(oracle.p, problem);
  oracle.iterations = iterations;
  if (!std::isfinite(oracle.energy)) throw NumericalError("oracle energy is not finite");
  if (!cache_dir.empty()) store_oracle(path, oracle, problem.alpha());
  return oracle;
}

ExperimentReport run_experiment_on(const Image& clean, const ExperimentSpec& spec) {
  spec.validate();
  const Decomposition dec(clean.size(), spec.block_rows, spec.block_cols, spec.shape);

  ExperimentReport report;
  report.method = spec.method;
  report.grid = clean.size();
  report.block_rows = spec.block_rows;
  report.block_cols = spec.block_cols;
  report.shape = spec.shape;
  report.color_count = dec.color_count();
  report.c1 = c1_constant(dec);
  report.interface_length = interface_length(dec);
  report.alpha = spec.alpha;
  report.noisy = add_gaussian_noise(clean, spec.noise_variance, spec.seed);
  report.noisy_psnr = psnr(report.noisy, clean);

  const RofProblem problem(report.noisy, spec.alpha);
  SolverConfig config;
  config.method = spec.method;
  config.outer_tol = spec.outer_tol;
  config.max_outer = spec.outer_max;
  config.inner = spec.inner;
  config.threads = spec.threads;
  if (spec.oracle_iters > 0) {
    const Oracle oracle = compute_oracle(problem, spec.oracle_iters, spec.oracle_cache_dir);
    report.oracle_energy = oracle.energy;
    config.oracle_energy = oracle.energy;
    config.stop = OuterStop::RelativeGap;
  } else {
    config.stop = OuterStop::EnergyChange;
  }

  SolveResult result = solve(problem, dec, config);
  report.denoised = recover_primal(result.p, problem);
  report.psnr = psnr(report.denoised, clean);
  result.trace.final_psnr = report.psnr;
  report.outer_iterations = result.trace.size();
  report.converged = result.trace.converged;
  report.wall_ms = result.trace.total_wall_ms;
  report.final_energy = result.trace.size() > 0 ? result.trace.iterations.back().energy : result.trace.initial_energy;
  if (report.oracle_energy) report.final_relative_gap = relative_gap(report.final_energy, *report.oracle_energy);
  report.trace = std::move(result.trace);
  report.p = std::move(result.p);
  return report;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const Image clean = read_pgm(spec.input_path);
  ExperimentReport report = run_experiment_on(clean, spec);
  if (!spec.output_path.empty()) write_pgm(report.denoised, spec.output_path);
  if (!spec.trace_csv_path.empty()) {
    write_text_file(spec.trace_csv_path,
                    [&](std::ostream& out) { write_trace_csv(out, report.trace, spec.trace_timing); });
  }
  if (!spec.report_path.empty()) {
    write_text_file(spec.report_path, [&](std::ostream& out) { write_report_json(out, report); });
  }
  return report;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const SolverTrace& trace, bool include_timing) {
  out << (include_timing ? "n,F,relative_gap,wall_ms,inner_iter_total\n" : "n,F,relative_gap,inner_iter_total\n");
  for (const auto& rec : trace.iterations) {
    out << rec.n << ',' << format_double(rec.energy) << ',' << format_double(rec.relative_gap) << ',';
    if (include_timing) out << format_double(rec.wall_ms) << ',';
    out << rec.inner_iterations << '\n';
  }
}

void write_decay_csv(std::ostream& out, std::span<const LabeledTrace> traces, double oracle_energy) {
  out << "method,n,F,relative_gap,bound_bregman,bound_c1\n";
  const std::string nan = "nan";
  for (const auto& labeled : traces) {
    if (labeled.trace == nullptr) continue;
    for (std::size_t k = 0; k < labeled.trace->iterations.size(); ++k) {
      const auto& rec = labeled.trace->iterations[k];
      out << labeled.label << ',' << rec.n << ',' << format_double(rec.energy) << ','
          << format_double(relative_gap(rec.energy, oracle_energy)) << ',';
      if (labeled.bounds && k < labeled.bounds->rows.size()) {
        out << format_double(labeled.bounds->rows[k].bound_bregman) << ','
            << format_double(labeled.bounds->rows[k].bound_c1) << '\n';
      } else {
        out << nan << ',' << nan << '\n';
      }
    }
  }
}

void write_report_json(std::ostream& out, const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["method"] = std::string(method_name(report.method));
  j["rows"] = report.grid.rows;
  j["cols"] = report.grid.cols;
  j["subdomains"] = std::to_string(report.block_rows) + "x" + std::to_string(report.block_cols);
  j["shape"] = std::string(shape_name(report.shape));
  j["colors"] = report.color_count;
  j["c1"] = report.c1;
  j["interface_length"] = report.interface_length;
  j["alpha"] = report.alpha;
  j["noisy_psnr"] = report.noisy_psnr;
  j["psnr"] = report.psnr;
  j["outer_iterations"] = report.outer_iterations;
  j["converged"] = report.converged;
  j["wall_ms"] = report.wall_ms;
  j["final_energy"] = report.final_energy;
  j["oracle_energy"] = report.oracle_energy ? nlohmann::ordered_json(*report.oracle_energy) : nullptr;
  j["final_relative_gap"] =
      report.final_relative_gap ? nlohmann::ordered_json(*report.final_relative_gap) : nullptr;
  long long inner = 0;
  for (const auto& rec : report.trace.iterations) inner += rec.inner_iterations;
  j["inner_iterations_total"] = inner;
  out << j.dump(2) << '\n';
}

JumpStatistics interface_jumps(const Image& u, const Decomposition& dec) {
  if (!(u.size() == dec.grid())) throw InvalidArgument("interface_jumps: image does not match the grid");
  JumpStatistics stats;
  double interface_sum = 0.0;
  double interior_sum = 0.0;
  const auto visit = [&](int i0, int j0, int i1, int j1) {
    const double jump = std::abs(u(i1, j1) - u(i0, j0));
    if (dec.owner(i0, j0) != dec.owner(i1, j1)) {
      interface_sum += jump;
      ++stats.interface_pairs;
    } else {
      interior_sum += jump;
      ++stats.interior_pairs;
    }
  };
  for (int i = 0; i < u.rows(); ++i) {
    for (int j = 0; j < u.cols(); ++j) {
      if (i + 1 < u.rows()) visit(i, j, i + 1, j);
      if (j + 1 < u.cols()) visit(i, j, i, j + 1);
    }
  }
  if (stats.interface_pairs > 0) stats.interface_mean = interface_sum / static_cast<double>(stats.interface_pairs);
  if (stats.interior_pairs > 0) stats.interior_mean = interior_sum / static_cast<double>(stats.interior_pairs);
  return stats;
}

}  // namespace tvdd
