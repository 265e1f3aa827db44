#pragma once

// Per-stage timing of the embedding pipeline across a dimension grid.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "fjlp/embed.hpp"
#include "fjlp/random.hpp"
#include "fjlp/stats.hpp"
#include "fjlp/wht.hpp"

namespace fjlp::bench {

struct StageTimes {
  std::uint64_t d = 0;
  std::size_t k = 0;
  double signs = 0.0;     // D3, D2, D1 multiplies
  double hadamard = 0.0;  // both H stages
  double a_fast = 0.0;
  std::optional<double> a_explicit;
  double full = 0.0;  // apply() end to end
};

struct BenchConfig {
  std::vector<std::uint64_t> dims{std::uint64_t{1} << 16, std::uint64_t{1} << 18,
                                  std::uint64_t{1} << 20, std::uint64_t{1} << 22};
  std::size_t k = 16;
  double p = 1.0;
  std::uint64_t seed = 0;
  unsigned repetitions = 5;
  std::uint64_t explicit_budget = std::uint64_t{1} << 26;  // k*d entry evaluations
};

struct BenchReport {
  BenchConfig config;
  std::vector<StageTimes> rows;
  double exponent_signs = 0, exponent_hadamard = 0, exponent_fast = 0, exponent_full = 0;
  std::optional<double> exponent_explicit;
  double fast_max_doubling_factor = 0;  // worst (t2/t1)^(1 / log2(d2/d1))
  double full_dlogd_r2 = 0;             // R^2 of t = a + c * d log2 d
  double full_dlogd_slope = 0;

  nlohmann::json to_json() const {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json row{{"d", r.d},           {"k", r.k},
                         {"signs_s", r.signs}, {"hadamard_s", r.hadamard},
                         {"a_fast_s", r.a_fast}, {"full_s", r.full}};
      row["a_explicit_s"] = r.a_explicit ? nlohmann::json(*r.a_explicit) : nlohmann::json(nullptr);
      rs.push_back(row);
    }
    nlohmann::json ex{{"signs", exponent_signs},
                      {"hadamard", exponent_hadamard},
                      {"a_fast", exponent_fast},
                      {"full", exponent_full}};
    ex["a_explicit"] = exponent_explicit ? nlohmann::json(*exponent_explicit) : nlohmann::json(nullptr);
    return nlohmann::json{{"k", config.k},
                          {"p", config.p},
                          {"seed", config.seed},
                          {"repetitions", config.repetitions},
                          {"threads", default_thread_count()},
                          {"stages", rs},
                          {"loglog_exponents", ex},
                          {"a_fast_max_doubling_factor", fast_max_doubling_factor},
                          {"full_dlogd_fit", {{"slope", full_dlogd_slope}, {"r2", full_dlogd_r2}}}};
  }
};

// Minimum wall time over `reps` runs of fn.
template <typename Fn>
double min_time(unsigned reps, Fn&& fn) {
  double best = INFINITY;
  for (unsigned r = 0; r < std::max(1U, reps); ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

// Keeps results observable so the timed work is not optimized away.
inline volatile double g_sink = 0.0;

inline StageTimes time_stages(const Transform& t, unsigned reps, std::uint64_t explicit_budget,
                              std::uint64_t seed) {
  const std::uint64_t d = t.padded_dim();
  RealVector x(t.input_dim());
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  for (double& v : x) v = normal(gen);
  RealVector buf(d);
  StageTimes st;
  st.d = t.input_dim();
  st.k = t.output_dim();

  auto reset = [&] { std::copy(x.begin(), x.end(), buf.begin()); };
  st.signs = min_time(reps, [&] {
    reset();
    for (int s = 3; s >= 1; --s) {
      const auto sg = t.signs(s);
      for (std::uint64_t j = 0; j < d; ++j) buf[j] *= sg[j];
    }
    g_sink = buf[0];
  });
  st.hadamard = min_time(reps, [&] {
    reset();
    fwht_normalized_inplace(buf);
    fwht_normalized_inplace(buf);
    g_sink = buf[0];
  });
  reset();
  st.a_fast = min_time(reps, [&] { g_sink = t.matrix().multiply_fast(buf)[0]; });
  if (static_cast<std::uint64_t>(t.output_dim()) * d <= explicit_budget)
    st.a_explicit = min_time(std::min(reps, 2U), [&] { g_sink = t.matrix().multiply_explicit(buf)[0]; });
  st.full = min_time(reps, [&] { g_sink = t.apply(x)[0]; });
  return st;
}

inline double loglog_slope(const std::vector<double>& d, const std::vector<double>& t) {
  std::vector<double> ld, lt;
  for (std::size_t i = 0; i < d.size(); ++i) {
    ld.push_back(std::log2(d[i]));
    lt.push_back(std::log2(std::max(t[i], 1e-12)));
  }
  return stats::linear_fit(ld, lt).slope;
}

inline BenchReport run(const BenchConfig& cfg) {
  BenchReport rep;
  rep.config = cfg;
  for (std::uint64_t d : cfg.dims) {
    const Transform t(d, cfg.k, cfg.p, cfg.seed, KGate::relaxed);
    rep.rows.push_back(time_stages(t, cfg.repetitions, cfg.explicit_budget, cfg.seed));
  }
  if (rep.rows.size() < 2) return rep;
  std::vector<double> ds, signs, had, fast, full, dlogd, ex_d, ex_t;
  for (const auto& r : rep.rows) {
    const double d = static_cast<double>(padded_dimension(r.d));
    ds.push_back(d);
    signs.push_back(r.signs);
    had.push_back(r.hadamard);
    fast.push_back(r.a_fast);
    full.push_back(r.full);
    dlogd.push_back(d * std::log2(d));
    if (r.a_explicit) {
      ex_d.push_back(d);
      ex_t.push_back(*r.a_explicit);
    }
  }
  rep.exponent_signs = loglog_slope(ds, signs);
  rep.exponent_hadamard = loglog_slope(ds, had);
  rep.exponent_fast = loglog_slope(ds, fast);
  rep.exponent_full = loglog_slope(ds, full);
  if (ex_d.size() >= 2) rep.exponent_explicit = loglog_slope(ex_d, ex_t);
  for (std::size_t i = 1; i < ds.size(); ++i) {
    const double doublings = std::log2(ds[i] / ds[i - 1]);
    if (doublings <= 0) continue;
    rep.fast_max_doubling_factor =
        std::max(rep.fast_max_doubling_factor, std::pow(fast[i] / fast[i - 1], 1.0 / doublings));
  }
  const auto fit = stats::linear_fit(dlogd, full);
  rep.full_dlogd_r2 = fit.r2;
  rep.full_dlogd_slope = fit.slope;
  return rep;
}

}  // namespace fjlp::bench
