#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "../support/oracles.hpp"
#include "tvdd/errors.hpp"
#include "tvdd/experiment.hpp"
#include "tvdd/noise.hpp"
#include "tvdd/pgm.hpp"
#include "tvdd/synthetic.hpp"

using namespace tvdd;

namespace {

Image parse(const std::string& bytes) {
  std::istringstream in(bytes);
  return parse_pgm(in);
}

std::string encode(const Image& u, PgmEncoding enc, int maxval = 255) {
  std::ostringstream out;
  write_pgm(u, out, enc, maxval);
  return out.str();
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Byte offset carried by an IoError message, or -1.
long error_offset(const std::string& bytes) {
  try {
    parse(bytes);
  } catch (const IoError& e) {
    const std::string msg = e.what();
    const auto at = msg.find("(at byte ");
    return at == std::string::npos ? -1 : std::stol(msg.substr(at + 9));
  }
  return -2;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("tvdd-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("bench_cli") {

TEST_CASE("plain PGM fixture") {
  const Image u = parse("P2\n2 2\n255\n0 255\n128 64\n");
  CHECK(u.rows() == 2);
  CHECK(u.cols() == 2);
  CHECK(u(0, 0) == 0.0);
  CHECK(u(0, 1) == 1.0);
  CHECK(u(1, 0) == 128.0 / 255.0);
  CHECK(u(1, 1) == 64.0 / 255.0);
}

TEST_CASE("header comments and odd whitespace") {
  const Image u = parse("P2 # comment\n# another\n3\t1 # width then height\n 15 \n1 2\n\n3\n");
  CHECK(u.cols() == 3);
  CHECK(u(0, 2) == 3.0 / 15.0);
}

TEST_CASE("raw and plain encodings load identically and round trip") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> byte(0, 255);
  Image u(13, 17);
  for (double& v : u.values()) v = byte(rng) / 255.0;
  const std::string raw = encode(u, PgmEncoding::Raw);
  const std::string plain = encode(u, PgmEncoding::Plain);
  CHECK(raw.substr(0, 2) == "P5");
  CHECK(plain.substr(0, 2) == "P2");
  const Image a = parse(raw);
  const Image b = parse(plain);
  for (std::size_t k = 0; k < u.values().size(); ++k) {
    CHECK(a.values()[k] == u.values()[k]);
    CHECK(b.values()[k] == u.values()[k]);
  }
  CHECK(encode(a, PgmEncoding::Raw) == raw);
  std::istringstream lines(plain);
  for (std::string line; std::getline(lines, line);) CHECK(line.size() <= 70);
}

TEST_CASE("sixteen-bit raw samples") {
  Image u(2, 3);
  u(0, 0) = 1.0;
  u(1, 2) = 300.0 / 65535.0;
  const std::string bytes = encode(u, PgmEncoding::Raw, 65535);
  const Image v = parse(bytes);
  CHECK(v(0, 0) == 1.0);
  CHECK(v(1, 2) == 300.0 / 65535.0);
  CHECK(bytes.size() == std::string("P5\n3 2\n65535\n").size() + 12);
}

TEST_CASE("writer rounds and clamps") {
  const Image u(1, 4, {-0.3, 0.5, 1.7, 0.2});
  const Image v = parse(encode(u, PgmEncoding::Plain));
  CHECK(v(0, 0) == 0.0);
  CHECK(v(0, 1) == 128.0 / 255.0);  // 127.5 rounds away from zero
  CHECK(v(0, 2) == 1.0);
  CHECK(v(0, 3) == 51.0 / 255.0);
}

TEST_CASE("malformed PGM reports the byte offset") {
  CHECK(error_offset("P3\n1 1\n255\n0\n") == 0);
  CHECK(error_offset("P2\n2 x\n255\n") == 5);
  CHECK(error_offset("P2\n2 2\n255\n1 2 3") == 16);
  CHECK(error_offset("P5\n2 2\n255\n\x01\x02") == 13);
  CHECK(error_offset("P2\n1 1\n10\n11\n") == 10);
  CHECK(error_offset("P2\n0 1\n255\n") >= 0);
  CHECK_THROWS_AS(read_pgm("/nonexistent/file.pgm"), IoError);
}

TEST_CASE("Philox known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("Gaussian noise") {
  const Image clean = make_synthetic_image(256, 256);
  SUBCASE("zero variance is the identity") {
    const Image same = add_gaussian_noise(clean, 0.0, 5);
    for (std::size_t k = 0; k < clean.values().size(); ++k) CHECK(same.values()[k] == clean.values()[k]);
  }
  SUBCASE("sample moments") {
    const Image noisy = add_gaussian_noise(clean, 0.05, 12345);
    const Image eta = noisy - clean;
    const double count = static_cast<double>(eta.values().size());
    double mean = 0.0;
    for (double v : eta.values()) mean += v;
    mean /= count;
    double var = 0.0;
    for (double v : eta.values()) var += (v - mean) * (v - mean);
    var /= count - 1.0;
    CHECK(std::abs(mean) <= 3.0 * std::sqrt(0.05) / std::sqrt(count));
    CHECK(std::abs(var - 0.05) <= 0.05 * 0.05);
  }
  SUBCASE("fixed seed is reproducible and seeds differ") {
    const Image a = add_gaussian_noise(clean, 0.05, 7);
    const Image b = add_gaussian_noise(clean, 0.05, 7);
    const Image c = add_gaussian_noise(clean, 0.05, 8);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
    CHECK(standard_normal(7, 3) == doctest::Approx((a(0, 3) - clean(0, 3)) / std::sqrt(0.05)));
  }
  SUBCASE("unclamped and negative variance rejected") {
    const Image noisy = add_gaussian_noise(clean, 0.05, 1);
    double lo = 1.0, hi = 0.0;
    for (double v : noisy.values()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(lo < 0.0);
    CHECK(hi > 1.0);
    CHECK_THROWS_AS(add_gaussian_noise(clean, -1.0, 1), InvalidArgument);
  }
  SUBCASE("noisy PSNR matches the noise level") {
    // E||eta||^2 = |Omega| sigma^2, so PSNR ~ 10 log10(1 / 0.05) = 13.01 dB.
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
      const double value = psnr(add_gaussian_noise(clean, 0.05, seed), clean);
      CHECK(std::abs(value - 10.0 * std::log10(20.0)) <= 0.3);
    }
  }
}

TEST_CASE("synthetic fixture") {
  const Image a = make_synthetic_image(64, 96);
  const Image b = make_synthetic_image(64, 96);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  for (double v : a.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(oracle::total_variation(a) > 0.0);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("trace CSV") {
  SolverTrace empty;
  std::ostringstream a;
  write_trace_csv(a, empty);
  CHECK(a.str() == "n,F,relative_gap,wall_ms,inner_iter_total\n");
  std::ostringstream b;
  write_trace_csv(b, empty, false);
  CHECK(b.str() == "n,F,relative_gap,inner_iter_total\n");

  SolverTrace t;
  IterationRecord rec;
  rec.n = 1;
  rec.energy = 2.5;
  rec.relative_gap = 0.25;
  rec.wall_ms = 3.0;
  rec.inner_iterations = 40;
  t.iterations.push_back(rec);
  std::ostringstream c;
  write_trace_csv(c, t);
  CHECK(c.str() == "n,F,relative_gap,wall_ms,inner_iter_total\n1,2.5,0.25,3,40\n");

  std::ostringstream d;
  write_decay_csv(d, std::span<const LabeledTrace>{}, 1.0);
  CHECK(d.str() == "method,n,F,relative_gap,bound_bregman,bound_c1\n");
}

TEST_CASE("decay CSV carries the bounds and a monotone RJ column") {
  std::mt19937_64 rng(3);
  const RofProblem prob(oracle::random_image(16, 16, rng), 10.0);
  const Decomposition dec({16, 16}, 4, 4, Shape::Window);
  const DualField p_star = fista_reference(prob, 20000);
  const double f_star = dual_energy(p_star, prob);
  SolverConfig cfg;
  cfg.stop = OuterStop::IterationLimit;
  cfg.max_outer = 20;
  cfg.method = Method::RelaxedJacobi;
  const SolveResult rj = solve(prob, dec, cfg);
  cfg.method = Method::GaussSeidel;
  const SolveResult gs = solve(prob, dec, cfg);
  const BoundReport bounds = evaluate_bounds(rj.trace, dec, prob, DualField(16, 16), p_star);
  const LabeledTrace rows[] = {{"rj", &rj.trace, &bounds}, {"gs", &gs.trace, nullptr}};
  std::ostringstream out;
  write_decay_csv(out, rows, f_star);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  int count = 0;
  double previous = INFINITY;
  while (std::getline(in, line)) {
    ++count;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    REQUIRE(cells.size() == 6);
    if (cells[0] == "rj") {
      const double gap = std::stod(cells[3]);
      CHECK(gap <= previous);
      previous = gap;
      CHECK(std::stod(cells[4]) >= gap);
    } else {
      CHECK(cells[4] == "nan");
    }
  }
  CHECK(count == 40);
}

TEST_CASE("oracle cache") {
  const auto dir = scratch_dir("oracle");
  std::mt19937_64 rng(5);
  const RofProblem prob(oracle::random_image(10, 8, rng), 4.0);
  const Oracle a = compute_oracle(prob, 300, dir.string());
  CHECK_FALSE(a.from_cache);
  const Oracle b = compute_oracle(prob, 300, dir.string());
  CHECK(b.from_cache);
  CHECK(b.energy == a.energy);
  CHECK(b.p == a.p);
  CHECK_FALSE(compute_oracle(prob, 301, dir.string()).from_cache);
  CHECK_FALSE(compute_oracle(RofProblem(prob.data(), 4.5), 300, dir.string()).from_cache);
  std::filesystem::remove_all(dir);
}

TEST_CASE("experiment end to end") {
  const auto dir = scratch_dir("experiment");
  const Image clean = make_synthetic_image(64, 64);
  write_pgm(clean, (dir / "clean.pgm").string());

  ExperimentSpec spec;
  spec.input_path = (dir / "clean.pgm").string();
  spec.block_rows = 4;
  spec.block_cols = 4;
  spec.oracle_iters = 5000;
  spec.oracle_cache_dir = (dir / "cache").string();
  spec.output_path = (dir / "out.pgm").string();
  spec.trace_csv_path = (dir / "trace.csv").string();
  spec.report_path = (dir / "report.json").string();
  spec.trace_timing = false;

  const ExperimentReport first = run_experiment(spec);
  CHECK(first.converged);
  CHECK(*first.final_relative_gap < 1e-5);
  CHECK(first.psnr > first.noisy_psnr);
  CHECK(first.color_count == 3);
  CHECK(first.interface_length == 64 * 3 * 2);
  const std::string csv = slurp(dir / "trace.csv");
  const std::string pgm = slurp(dir / "out.pgm");
  CHECK(csv.rfind("n,F,relative_gap,inner_iter_total\n", 0) == 0);
  CHECK(slurp(dir / "report.json").find("\"psnr\"") != std::string::npos);

  spec.threads = 3;
  const ExperimentReport second = run_experiment(spec);
  CHECK(slurp(dir / "trace.csv") == csv);
  CHECK(slurp(dir / "out.pgm") == pgm);
  CHECK(second.psnr == first.psnr);

  SUBCASE("no oracle falls back to energy change") {
    spec.oracle_iters = 0;
    spec.trace_csv_path.clear();
    const ExperimentReport r = run_experiment(spec);
    CHECK_FALSE(r.oracle_energy.has_value());
    CHECK(r.converged);
  }
  SUBCASE("bad specs") {
    spec.alpha = 0.0;
    CHECK_THROWS_AS(run_experiment(spec), InvalidArgument);
    spec.alpha = 10.0;
    spec.noise_variance = -0.1;
    CHECK_THROWS_AS(run_experiment(spec), InvalidArgument);
    spec.noise_variance = 0.05;
    spec.input_path = (dir / "missing.pgm").string();
    CHECK_THROWS_AS(run_experiment(spec), IoError);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("every method and decomposition gives the same PSNR") {
  const Image clean = make_synthetic_image(64, 64);
  ExperimentSpec spec;
  spec.oracle_iters = 5000;
  spec.method = Method::Fista;
  spec.block_rows = spec.block_cols = 1;
  const double reference = run_experiment_on(clean, spec).psnr;
  for (Method m : {Method::RelaxedJacobi, Method::PreRelaxedJacobi, Method::FastPreRelaxedJacobi,
                   Method::GaussSeidel}) {
    for (auto [br, bc, shape] : {std::tuple{4, 4, Shape::Window}, std::tuple{2, 2, Shape::Window},
                                 std::tuple{4, 1, Shape::Stripe}}) {
      spec.method = m;
      spec.block_rows = br;
      spec.block_cols = bc;
      spec.shape = shape;
      const ExperimentReport r = run_experiment_on(clean, spec);
      CHECK_MESSAGE(std::abs(r.psnr - reference) < 0.01, method_name(m), " ", br, "x", bc);
    }
  }
}

TEST_CASE("denoised images show no interface artifacts") {
  const Image clean = make_synthetic_image(128, 128);
  ExperimentSpec spec;
  spec.oracle_iters = 20000;
  spec.block_rows = spec.block_cols = 8;
  const ExperimentReport r = run_experiment_on(clean, spec);
  const JumpStatistics jumps = interface_jumps(r.denoised, Decomposition({128, 128}, 8, 8, Shape::Window));
  CHECK(jumps.interface_pairs == 2u * 7u * 128u);
  CHECK(std::abs(jumps.interface_mean - jumps.interior_mean) < 0.2 * jumps.interior_mean);
}

}  // TEST_SUITE
