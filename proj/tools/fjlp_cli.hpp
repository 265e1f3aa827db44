#pragma once

// Command implementations for the fjlp executable. Kept in a header so the
// test suite can drive the same code paths without spawning processes.
//
// Exit codes: 0 pass, 1 verification failure, 2 parameter error,
// 3 I/O or format error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fjlp/fjlp.hpp"

namespace fjlp::cli {

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kBadParameters = 2, kFormatError = 3 };

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

inline void emit(const nlohmann::json& j, const std::string& path, Streams io) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty())
    io.out << text;
  else
    io::write_file(path, text);
}

inline RealVector make_input(const std::string& kind, std::size_t d, std::uint64_t seed) {
  if (kind == "flat") return verify::flat_vector(d);
  if (kind == "e1") return verify::basis_vector(d);
  if (kind == "random") {
    std::mt19937_64 gen(hash3(seed, 0x696e707574ULL, d));
    std::normal_distribution<double> normal;
    RealVector x(d);
    for (double& v : x) v = normal(gen);
    const double n = stats::lp_norm(x, 2.0);
    for (double& v : x) v /= n;
    return x;
  }
  throw std::invalid_argument("--x must be flat, e1 or random");
}

inline int report_exit(const VerificationReport& rep, const std::string& path, Streams io) {
  nlohmann::json j = rep.to_json();
  j["params"]["threads"] = default_thread_count();
  emit(j, path, io);
  io.err << rep.check << ": " << (rep.pass ? "PASS" : "FAIL") << " estimate=" << rep.estimate
         << " bound=" << rep.bound << "\n";
  return rep.pass ? kPass : kCheckFailed;
}

struct Options {
  // shared
  std::string out;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  double c0 = MomentConstants::kDefaultC0;
  bool relaxed = false;
  bool strict = false;
  // plan
  std::optional<std::size_t> n;
  std::optional<double> eps, rho;
  std::optional<std::uint64_t> d;
  std::optional<std::size_t> k;
  double p = 1.0;
  // embed
  std::string in, spec;
  // verify
  std::size_t trials = 10000;
  std::string x = "flat";
  double t = 1.0;
  unsigned restarts = 50;
  unsigned iterations = 10000;
  std::uint64_t budget = 1'000'000'000ULL;
  double threshold = 0.05;
  // bench
  std::vector<std::uint64_t> dims;
  unsigned reps = 5;
  // lowerbound
  std::size_t families = 100;
  std::string map = "identity";
  std::vector<double> eps_grid{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08};
  std::vector<double> n_grid{1025, 65537, 1048577};
};

inline KGate gate_of(const Options& o) {
  if (o.relaxed && o.strict) throw std::invalid_argument("--strict and --relaxed are exclusive");
  return o.relaxed ? KGate::relaxed : KGate::strict;
}

template <typename T>
T need(const std::optional<T>& v, const char* flag) {
  if (!v) throw std::invalid_argument(std::string("missing required flag ") + flag);
  return *v;
}

// ---- plan ------------------------------------------------------------------

inline int cmd_plan(const Options& o, Streams io) {
  const bool want_req = o.n || o.eps || o.rho;
  const bool want_transform = o.d || o.k;
  if (!want_req && !want_transform)
    throw std::invalid_argument("plan needs --n/--eps/--rho and/or --d/--k");
  nlohmann::json req, tr;
  if (want_req) {
    const auto n = need(o.n, "--n");
    const auto eps = need(o.eps, "--eps");
    const auto rho = need(o.rho, "--rho");
    if (n < 2 || !(eps > 0 && eps < 1) || !(rho > 0 && rho < 1) || !(o.c0 > 0))
      throw std::invalid_argument("plan: need n >= 2, eps in (0,1), rho in (0,1), C0 > 0");
    req = {{"n", n},
           {"eps", eps},
           {"rho", rho},
           {"C0", o.c0},
           {"required_k", verify::required_k(n, eps, rho, o.c0)},
           {"required_k_union", verify::required_k_union(n, eps, rho)}};
  }
  if (want_transform) {
    const Transform t(need(o.d, "--d"), need(o.k, "--k"), o.p, o.seed, gate_of(o));
    tr = io::transform_to_json(t);
  }
  if (want_req && want_transform)
    emit({{"requirement", req}, {"transform", tr}}, o.out, io);
  else
    emit(want_req ? req : tr, o.out, io);
  return kPass;
}

// ---- embed -----------------------------------------------------------------

inline int cmd_embed(const Options& o, Streams io) {
  if (o.in.empty() || o.out.empty()) throw std::invalid_argument("embed needs --in and --out");
  const io::VectorSet input = io::read_vectors(o.in);
  std::optional<Transform> t;
  if (!o.spec.empty()) {
    t.emplace(io::read_transform(o.spec));
  } else {
    std::uint64_t d = o.d.value_or(input.rows.empty() ? 0 : input.rows.front().size());
    t.emplace(d, need(o.k, "--k"), o.p, o.seed, gate_of(o));
  }
  for (const auto& row : input.rows)
    if (row.size() != t->input_dim())
      throw std::invalid_argument("embed: input dimension " + std::to_string(row.size()) +
                                  " != transform dimension " + std::to_string(t->input_dim()));
  const auto outputs = t->apply_set(input.rows);
  io::write_vectors(o.out, outputs, input.format);
  io.err << "embedded " << outputs.size() << " vectors into R^" << t->output_dim() << "\n";
  return kPass;
}

// ---- verify ----------------------------------------------------------------

inline int cmd_verify(const std::string& check, const Options& o, Streams io) {
  if (check == "fourwise") {
    const FourWiseMatrix a(need(o.k, "--k"), need(o.d, "--d"));
    return report_exit(verify_strength4(a, o.budget), o.out, io);
  }
  if (check == "moment") {
    const std::size_t d = need(o.d, "--d");
    if (d < 1 || d > verify::kMaxEnumerationDim)
      throw std::invalid_argument("verify moment: --d must lie in [1, 20]");
    const RealVector x = make_input(o.x, d, o.seed);
    const RealVector row(d, 1.0);
    auto rep = verify::moment_check(o.p, x, row, o.c0);
    rep.params["x"] = o.x;
    return report_exit(rep, o.out, io);
  }
  if (check == "flatness") {
    const std::size_t d = need(o.d, "--d");
    const RealVector x = make_input(o.x, d, o.seed);
    auto rep = verify::l4_flatness_check(x, o.t, o.trials, o.seed);
    rep.params["x"] = o.x;
    return report_exit(rep, o.out, io);
  }
  if (check == "tail" || check == "gaussian") {
    const std::size_t d = need(o.d, "--d");
    const Transform t(d, need(o.k, "--k"), o.p, o.seed, gate_of(o));
    const RealVector x = make_input(o.x, d, o.seed);
    auto rep = check == "tail" ? verify::tail_estimate(t, x, need(o.eps, "--eps"), o.trials)
                               : verify::compare_gaussian(t, x, o.trials, o.threshold);
    rep.params["x"] = o.x;
    return report_exit(rep, o.out, io);
  }
  if (check == "opnorm") {
    const FourWiseMatrix a(need(o.k, "--k"), need(o.d, "--d"));
    const std::size_t cases = o.trials;
    double worst_ratio = 0.0;
    bool all_ok = true;
    for (std::size_t c = 0; c < cases; ++c) {
      const RealVector x = make_input(o.x, a.cols(), o.seed + c);
      const auto r = verify::opnorm_check(a, x, o.iterations);
      all_ok = all_ok && r.pass;
      worst_ratio = std::max(worst_ratio, r.estimate / r.bound);
    }
    const auto lower = verify::opnorm_2to4_lower(a, o.restarts, o.seed);
    VerificationReport rep;
    rep.check = "opnorm";
    rep.estimate = lower.value;
    rep.ci = {lower.value, lower.value};
    rep.bound = lower.bound;
    rep.trials = cases;
    rep.seed = o.seed;
    rep.pass = all_ok && lower.pass;
    rep.params = {{"k", a.rows()},
                  {"d", a.cols()},
                  {"x", o.x},
                  {"restarts", o.restarts},
                  {"m_2to2_worst_ratio_to_bound", worst_ratio},
                  {"m_2to2_all_within_bound", all_ok},
                  {"at_2to4_lower_bound", lower.value}};
    return report_exit(rep, o.out, io);
  }
  if (check == "distortion") {
    std::vector<RealVector> pts;
    if (!o.in.empty()) {
      pts = io::read_vectors(o.in).rows;
    } else {
      const std::size_t n = need(o.n, "--n");
      const std::uint64_t d = need(o.d, "--d");
      std::mt19937_64 gen(hash3(o.seed, 0x706f696e7473ULL, n));
      std::normal_distribution<double> normal;
      pts.assign(n, RealVector(d));
      for (auto& v : pts)
        for (double& c : v) c = normal(gen);
    }
    if (pts.size() < 2) throw std::invalid_argument("verify distortion: need at least 2 points");
    auto rep = verify::distortion_suite(pts, need(o.k, "--k"), o.p, need(o.eps, "--eps"),
                                        o.rho.value_or(0.01), o.seed, gate_of(o), o.c0);
    return report_exit(rep, o.out, io);
  }
  throw std::invalid_argument("unknown check '" + check + "'");
}

// ---- bench -----------------------------------------------------------------

inline int cmd_bench(const Options& o, Streams io) {
  bench::BenchConfig cfg;
  if (!o.dims.empty()) cfg.dims = o.dims;
  for (auto d : cfg.dims)
    if (!is_power_of_four(d)) throw std::invalid_argument("bench: --dims must be powers of 4");
  if (o.k) cfg.k = *o.k;
  cfg.p = o.p;
  cfg.seed = o.seed;
  cfg.repetitions = o.reps;
  const auto rep = bench::run(cfg);
  emit(rep.to_json(), o.out, io);
  for (const auto& r : rep.rows)
    io.err << "d=" << r.d << " full=" << r.full << "s a_fast=" << r.a_fast << "s\n";
  return kPass;
}

// ---- lowerbound ------------------------------------------------------------

inline int cmd_lowerbound(const Options& o, Streams io) {
  const double eps = o.eps.value_or(0.05);
  if (!(eps > 0) || eps > lowerbound::kMaxEps * (1.0 + 1e-12))
    throw std::invalid_argument("lowerbound: eps must lie in (0, 1/sqrt(128)]");
  const std::size_t d = o.d.value_or(8);
  const std::size_t k = o.k.value_or(d);
  if (o.map != "identity" && o.map != "orthogonal")
    throw std::invalid_argument("--map must be identity or orthogonal");
  if (o.map == "identity" && k != d)
    throw std::invalid_argument("identity map needs k == d");
  const auto cover = lowerbound::make_cover(k, eps);

  std::size_t recovered = 0, gap_violations = 0;
  for (std::size_t f = 0; f < o.families; ++f) {
    const auto family = lowerbound::hard_family_build(d, eps, hash3(o.seed, 0x6c62ULL, f));
    std::vector<double> q;
    if (o.map == "orthogonal") {
      if (k < d) throw std::invalid_argument("orthogonal map needs k >= d");
      q = lowerbound::random_orthogonal(k, hash3(o.seed, 0x6f7274ULL, f));
    }
    auto map = [&](const RealVector& x) {
      if (o.map == "identity") return x;
      RealVector y(k, 0.0);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < d; ++j) y[i] += q[i * k + j] * x[j];
      return y;
    };
    const auto enc = lowerbound::encode_map(family, map, cover);
    const auto dec = lowerbound::decode_subsets(enc.bits, d, cover, family.s);
    gap_violations += dec.gap_violations;
    if (dec.ok && dec.subsets == family.subsets) ++recovered;
  }

  nlohmann::json rows = nlohmann::json::array();
  for (double n : o.n_grid)
    for (double e : o.eps_grid) {
      const std::size_t s = lowerbound::subset_size(e);
      const auto sep = lowerbound::separation_intervals(s, e);
      const auto dn = static_cast<std::size_t>((n - 1) / 2);
      const auto cv = lowerbound::make_cover(k, e);
      nlohmann::json row{{"n", n},
                         {"eps", e},
                         {"s", s},
                         {"d", dn},
                         {"d_in", sep.d_in},
                         {"d_out", sep.d_out},
                         {"gap", sep.gap},
                         {"disjoint", sep.disjoint},
                         {"eight_eps", sep.eight_eps},
                         {"k", k},
                         {"bits_per_point", cv.bits_per_point},
                         {"volumetric_bits_per_point", cv.volumetric_log2},
                         {"L", cv.total_bits(dn)}};
      row["tau"] = sep.tau ? nlohmann::json(*sep.tau) : nlohmann::json(nullptr);
      row["lower_bound_scale"] = e * e * n > 1.0 ? nlohmann::json(lowerbound::lower_bound_scale(n, e))
                                                 : nlohmann::json(nullptr);
      rows.push_back(row);
    }

  const bool pass = recovered == o.families;
  const nlohmann::json j{{"d", d},
                         {"k", k},
                         {"eps", eps},
                         {"s", lowerbound::subset_size(eps)},
                         {"map", o.map},
                         {"families", o.families},
                         {"recovered", recovered},
                         {"gap_violations", gap_violations},
                         {"bits_per_point", cover.bits_per_point},
                         {"total_bits", cover.total_bits(d)},
                         {"seed", o.seed},
                         {"pass", pass},
                         {"table", rows}};
  emit(j, o.out, io);
  io.err << "lowerbound: " << recovered << "/" << o.families << " exact recoveries\n";
  return pass ? kPass : kCheckFailed;
}

// ---- entry point -----------------------------------------------------------

inline int run(int argc, const char* const* argv, Streams io) {
  CLI::App app{"Fast l2 -> lp embeddings: planning, embedding, verification, benchmarks"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sc) {
    sc->add_option("--out", o.out, "Output path (default: stdout)");
    sc->add_option("--seed", o.seed, "Master seed");
    sc->add_option("--threads", o.threads, "Thread count (default: FJLP_THREADS or all cores)");
    sc->add_option("--C0", o.c0, "Berry-Esseen constant");
    sc->add_flag("--strict", o.strict, "Require k <= d^(1/4) (default)");
    sc->add_flag("--relaxed", o.relaxed, "Allow k up to sqrt(d_pad) - 1");
    sc->add_option("--d", o.d, "Input dimension");
    sc->add_option("--k", o.k, "Target dimension");
    sc->add_option("--p", o.p, "Norm exponent in [1, 2]");
    sc->add_option("--eps", o.eps, "Distortion");
  };

  auto* plan_cmd = app.add_subcommand("plan", "Required k and/or a transform spec");
  add_common(plan_cmd);
  plan_cmd->add_option("--n", o.n, "Number of points");
  plan_cmd->add_option("--rho", o.rho, "Failure probability");

  auto* embed_cmd = app.add_subcommand("embed", "Embed a vector file");
  add_common(embed_cmd);
  embed_cmd->add_option("--in", o.in, "Input vectors (CSV or FJLP binary)")->required();
  embed_cmd->add_option("--spec", o.spec, "Transform spec JSON");

  auto* verify_cmd = app.add_subcommand("verify", "Run a verification check");
  std::string check;
  verify_cmd->add_option("check", check,
                         "tail | moment | flatness | opnorm | fourwise | distortion | gaussian")
      ->required();
  add_common(verify_cmd);
  verify_cmd->add_option("--n", o.n, "Number of random points (distortion)");
  verify_cmd->add_option("--rho", o.rho, "Failure probability (distortion)");
  verify_cmd->add_option("--in", o.in, "Point file (distortion)");
  verify_cmd->add_option("--trials", o.trials, "Monte-Carlo trials / opnorm cases");
  verify_cmd->add_option("--x", o.x, "Input vector: flat | e1 | random");
  verify_cmd->add_option("--t", o.t, "Flatness deviation t");
  verify_cmd->add_option("--restarts", o.restarts, "Gradient-ascent restarts (opnorm)");
  verify_cmd->add_option("--iterations", o.iterations, "Power-iteration cap (opnorm)");
  verify_cmd->add_option("--budget", o.budget, "Entry-evaluation budget (fourwise)");
  verify_cmd->add_option("--threshold", o.threshold, "KS threshold (gaussian)");

  auto* bench_cmd = app.add_subcommand("bench", "Time pipeline stages across a d grid");
  add_common(bench_cmd);
  bench_cmd->add_option("--dims", o.dims, "Dimensions (powers of 4)");
  bench_cmd->add_option("--reps", o.reps, "Repetitions per stage (minimum is reported)");

  auto* lb_cmd = app.add_subcommand("lowerbound", "Encoding roundtrips and lower-bound table");
  add_common(lb_cmd);
  lb_cmd->add_option("--families", o.families, "Random families to roundtrip");
  lb_cmd->add_option("--map", o.map, "identity | orthogonal");
  lb_cmd->add_option("--eps-grid", o.eps_grid, "Table eps values");
  lb_cmd->add_option("--n-grid", o.n_grid, "Table n values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    const int rc = app.exit(e, io.out, io.err);
    return rc == 0 ? kPass : kBadParameters;
  }

  try {
    if (o.threads > 0) setenv("FJLP_THREADS", std::to_string(o.threads).c_str(), 1);
    if (*plan_cmd) return cmd_plan(o, io);
    if (*embed_cmd) return cmd_embed(o, io);
    if (*verify_cmd) return cmd_verify(check, o, io);
    if (*bench_cmd) return cmd_bench(o, io);
    if (*lb_cmd) return cmd_lowerbound(o, io);
  } catch (const FormatError& e) {
    io.err << "format error: " << e.what() << "\n";
    return kFormatError;
  } catch (const std::invalid_argument& e) {
    io.err << "invalid parameters: " << e.what() << "\n";
    return kBadParameters;
  } catch (const std::out_of_range& e) {
    io.err << "invalid parameters: " << e.what() << "\n";
    return kBadParameters;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return kFormatError;
  }
  return kBadParameters;
}

}  // namespace fjlp::cli
