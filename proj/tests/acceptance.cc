// Copyright 2026 The DisAgg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// Acceptance runner: one PASS/FAIL line per criterion. With `--only K` it
// runs criterion K alone, which is how ctest invokes it.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "disagg/committee.h"
#include "disagg/costmodel.h"
#include "disagg/errors.h"
#include "disagg/lcc.h"
#include "disagg/protocol.h"
#include "oracles.h"

namespace disagg {
namespace {

// Tolerances, pinned.
constexpr double kTrialBudgetSeconds = 30.0;       // criterion 1
constexpr double kTailTolerance = 1e-12;           // criterion 4, relative
constexpr double kDownload305Tolerance = 0.02;     // criterion 5
constexpr double kOpaDownloadTolerance = 0.02;     // criterion 5
constexpr double kSpeedupLow = 0.65 * 3.1;         // criterion 6
constexpr double kSpeedupHigh = 1.35 * 29.8;       // criterion 6
constexpr double kHeadlineLow = 15.0;              // criterion 6
constexpr double kHeadlineHigh = 35.0;             // criterion 6
constexpr double kGridBudgetSeconds = 300.0;       // criterion 6
constexpr double kMobileDownloadTolerance = 0.10;  // criterion 7
constexpr double kCommitteeTolerance = 0.05;       // criterion 7
constexpr double kSimBudgetSeconds = 10.0;         // criterion 8
constexpr double kRatioLow = 2.0;                  // criterion 9
constexpr double kRatioHigh = 8.0;                 // criterion 9

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string Fmt(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, ap);
  va_end(ap);
  return buf;
}

FieldVector RandomVector(const FieldPrime& f, std::size_t len, Prg& rng) {
  FieldVector v(f, len);
  for (std::size_t i = 0; i < len; ++i) v[i] = rng.uniform(f);
  return v;
}

// ---- 1 ----
Outcome HomomorphicExactness() {
  const auto t0 = Clock::now();
  std::size_t failures = 0, trials = 0;
  Prg rng(1);
  auto run = [&](const FieldPrime& f, int count) {
    for (int t = 0; t < count; ++t, ++trials) {
      const std::size_t n = 1 + rng.below(20);
      const std::size_t m = 1 + rng.below(64);
      const std::size_t rho = 1 + rng.below(8);
      const std::size_t t_c = 1 + rng.below(4);
      const std::size_t t_r = t_c + rho;
      const std::size_t a = t_r + 1 + rng.below(6);
      try {
        const auto params = SharingParams::Make(f, a, t_c, t_r);
        FieldVector want(f, m);
        std::vector<AggregatedShare> acc;
        for (std::size_t c = 0; c < n; ++c) {
          const FieldVector s = RandomVector(f, m, rng);
          add_into(want, s);
          const auto b = secret_share(s, params, rng);
          if (acc.empty()) {
            for (const auto& x : b) acc.push_back(to_aggregate(x));
          } else {
            for (std::size_t j = 0; j < a; ++j) accumulate(acc[j], b[j]);
          }
        }
        std::shuffle(acc.begin(), acc.end(), rng);
        acc.erase(acc.begin() + static_cast<std::ptrdiff_t>(t_r + rng.below(a - t_r + 1)), acc.end());
        if (!(secret_reconstruct(acc, params, m) == want)) ++failures;
      } catch (const std::exception&) {
        ++failures;
      }
    }
  };
  run(FieldPrime(97), 1000);
  run(FieldPrime::Default(), 100);
  const double secs = Since(t0);
  return {failures == 0 && secs < kTrialBudgetSeconds,
          Fmt("%zu trials, %zu failures, %.2fs (budget %.0fs)", trials, failures, secs,
              kTrialBudgetSeconds)};
}

// ---- 2 ----
Outcome ThresholdSharpness() {
  const FieldPrime f(97);
  const auto params = SharingParams::Make(f, 7, 2, 4);
  Prg rng(2);
  FieldVector want(f, 6);
  std::vector<AggregatedShare> acc;
  for (int c = 0; c < 3; ++c) {
    const FieldVector s = RandomVector(f, 6, rng);
    add_into(want, s);
    const auto b = secret_share(s, params, rng);
    if (acc.empty()) {
      for (const auto& x : b) acc.push_back(to_aggregate(x));
    } else {
      for (std::size_t j = 0; j < 7; ++j) accumulate(acc[j], b[j]);
    }
  }
  std::size_t ok = 0, refused = 0, wrong = 0, unexpected = 0;
  for (unsigned mask = 0; mask < (1u << 7); ++mask) {
    std::vector<AggregatedShare> subset;
    for (unsigned j = 0; j < 7; ++j) {
      if (mask & (1u << j)) subset.push_back(acc[j]);
    }
    try {
      const FieldVector got = secret_reconstruct(subset, params, 6);
      if (subset.size() >= 4 && got == want) {
        ++ok;
      } else {
        ++wrong;
      }
    } catch (const InsufficientSharesError&) {
      if (subset.size() < 4) {
        ++refused;
      } else {
        ++wrong;
      }
    } catch (const std::exception&) {
      ++unexpected;
    }
  }
  return {ok == 64 && refused == 64 && wrong == 0 && unexpected == 0,
          Fmt("%zu/64 subsets of size >= 4 exact, %zu/64 smaller subsets refused, %zu wrong, %zu other "
              "exceptions",
              ok, refused, wrong, unexpected)};
}

// ---- 3 ----
Outcome ExhaustivePrivacy() {
  const FieldPrime f(13);
  const std::size_t a = 11;  // every usable evaluation point at t_r = 2
  const auto params = SharingParams::Make(f, a, 1, 2);
  std::vector<std::vector<std::vector<int>>> hist(2, std::vector<std::vector<int>>(a, std::vector<int>(13, 0)));
  const std::uint64_t secrets[2] = {4, 11};
  for (int s = 0; s < 2; ++s) {
    for (std::uint64_t r = 0; r < 13; ++r) {
      std::vector<FieldVector> cols = {FieldVector(f, {FieldElement(secrets[s])}),
                                       FieldVector(f, {FieldElement(r)})};
      const auto shares = lcc_encode(cols, params);
      for (std::size_t j = 0; j < a; ++j) ++hist[s][j][shares[j][0].value()];
    }
  }
  bool uniform = true;
  for (int s = 0; s < 2; ++s) {
    for (std::size_t j = 0; j < a; ++j) {
      for (int c : hist[s][j]) uniform &= c == 1;
    }
  }
  const bool identical = hist[0] == hist[1];
  return {uniform && identical,
          Fmt("%zu shares x 13 noise values: marginals %s, %s across secrets", a,
              uniform ? "uniform" : "NOT uniform", identical ? "identical" : "different")};
}

// ---- 4 ----
double Rel(double got, double want) {
  return want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
}

Outcome CommitteeVsOracle() {
  Prg rng(4);
  int configs = 0, feasible = 0, mismatches = 0, not_minimal = 0, bft_checked = 0;
  double worst_tail = 0.0, worst_bft = 0.0;
  while (configs < 50) {
    const std::uint64_t n = 20 + rng.below(181);
    const std::uint64_t g = rng.below(26), d = rng.below(26);
    const unsigned kc = 8 + static_cast<unsigned>(rng.below(33));
    const unsigned ks = 8 + static_cast<unsigned>(rng.below(33));
    const std::uint64_t rho = 1 + rng.below(8);
    const bool bft = configs % 5 == 0;
    const ThreatConfig t{n, g / 100.0, d / 100.0, double(kc), double(ks), bft};
    const std::uint64_t kcount = g * n / 100, dcount = d * n / 100;
    ++configs;
    const auto want = oracle::BruteForceSolve(n, kcount, n - dcount, dcount, kc, ks, rho, bft);
    CommitteeSolution got;
    bool solved = true;
    try {
      got = solve_committee(t, rho);
    } catch (const NoSolutionError&) {
      solved = false;
    }
    if (solved != want.has_value()) {
      ++mismatches;
      continue;
    }
    if (!solved) continue;
    ++feasible;
    if (got.params.a != want->a || got.params.t_c != want->t_c || got.params.t_r != want->t_r) {
      ++mismatches;
    }
    if (got.params.a > rho + 2 &&
        oracle::ExactFeasible(n, kcount, n - dcount, kc, ks, rho, got.params.a - 1) &&
        !bft) {
      ++not_minimal;
    }
    const oracle::Hypergeom hc(n, kcount, got.params.a);
    const oracle::Hypergeom hs(n, n - dcount, got.params.a);
    worst_tail = std::max(worst_tail, Rel(got.tail_corrupt, hc.upper(got.params.t_c)));
    worst_tail = std::max(
        worst_tail,
        Rel(got.tail_survive, hs.lower(static_cast<std::int64_t>(got.params.t_r) - 1)));
    // Tails at every threshold, not only the chosen one.
    for (std::uint64_t x = 0; x <= got.params.a; ++x) {
      worst_tail = std::max(worst_tail,
                            Rel(hypergeom_upper_tail(n, kcount, got.params.a, x), hc.upper(x)));
    }
    const oracle::BftTail b = oracle::ConvolvedBft(n, kcount, dcount, got.params.a);
    worst_bft = std::max(worst_bft, Rel(bft_tail(n, t.gamma, t.delta, got.params.a), b.value()));
    ++bft_checked;
  }
  return {mismatches == 0 && not_minimal == 0 && worst_tail <= kTailTolerance &&
              worst_bft <= kTailTolerance,
          Fmt("%d configs (%d feasible): %d solver/oracle mismatches, %d non-minimal; worst "
              "relative tail error %.2e, bft %.2e over %d committees (tol %.0e)",
              configs, feasible, mismatches, not_minimal, worst_tail, worst_bft, bft_checked,
              kTailTolerance)};
}

// ---- 5 ----
Outcome DownloadFormulas() {
  const CostProfile p;
  const double d100 = disagg_download_bytes(10000, 10000, 100, p);
  const double d250 = disagg_download_bytes(10000, 10000, 250, p);
  const double d305 = disagg_download_bytes(10000, 10000, 305, p);
  const double mobile = disagg_download_bytes(1000000, 1000000, 1331, p);
  const double opa = opa_committee_download_bytes(1000000, 1017, p);
  const bool ok = d100 == 16e6 && d250 == 6.4e6 &&
                  std::abs(d305 - 5.2e6) <= kDownload305Tolerance * 5.2e6 && mobile > 12e9 &&
                  std::abs(opa - 32.2e6) <= kOpaDownloadTolerance * 32.2e6;
  return {ok, Fmt("rho=100: %.0f B, rho=250: %.0f B, rho=305: %.0f B, mobile: %.3f GB, OPA "
                  "committee: %.2f MB",
                  d100, d250, d305, mobile / 1e9, opa / 1e6)};
}

// ---- 6 ----
Outcome SpeedupReproduction() {
  const auto t0 = Clock::now();
  const CostProfile p;
  const std::vector<std::uint64_t> axis = {1000, 10000, 100000, 1000000};
  const auto cells = speedup_grid(axis, axis, ThreatForK(1000, 0.3), p);
  double lo = 1e300, hi = 0.0, headline = 0.0;
  bool disagg_faster = true;
  for (const auto& c : cells) {
    lo = std::min(lo, c.speedup);
    hi = std::max(hi, c.speedup);
    disagg_faster &= c.disagg.cost.total() < c.opa.cost.total();
    if (c.m == 1000000 && c.n == 1000000) headline = c.speedup;
  }
  double fig3_min = 1e300;
  for (std::uint64_t v : {10000u, 100000u, 1000000u}) {
    for (const auto& c : speedup_grid({v}, {v}, ThreatForK(v, 0.3), p)) {
      fig3_min = std::min(fig3_min, c.speedup);
    }
  }
  const double secs = Since(t0);
  const bool envelope = lo >= kSpeedupLow && hi <= kSpeedupHigh;
  const bool head = headline >= kHeadlineLow && headline <= kHeadlineHigh;
  return {envelope && head && disagg_faster && fig3_min > 4.0 && secs < kGridBudgetSeconds,
          Fmt("grid speedups [%.2f, %.2f] within [%.3f, %.3f]; M=N=1e6: %.2f within [%.0f, %.0f]; "
              "DisAgg faster in every cell: %s; min k=0.3 diagonal speedup %.2f > 4; %.1fs",
              lo, hi, kSpeedupLow, kSpeedupHigh, headline, kHeadlineLow, kHeadlineHigh,
              disagg_faster ? "yes" : "no", fig3_min, secs)};
}

// ---- 7 ----
Outcome TradeoffOptimizer() {
  const CostProfile p;
  const TradeoffResult big = tradeoff_optimize(1000000, 1000000, ThreatForK(1000000, 0.3), p, 3.0);
  const bool mobile = std::abs(big.download_bytes - 269e6) <= kMobileDownloadTolerance * 269e6;
  std::string detail = Fmt("M=N=1e6: %.1f MB at rho=%llu (S=%.2f), target 269 MB +-10%%: %s", big.download_bytes / 1e6,
                           static_cast<unsigned long long>(big.rho), big.speedup, mobile ? "ok" : "off");
  struct Row {
    double target;
    std::uint64_t a, rho;
  };
  const Row rows[] = {{3.0, 220, 100}, {1.54, 461, 250}, {1.18, 551, 305}};
  const std::vector<std::uint64_t> grid = {25, 50, 100, 250, 305, 500, 1000};
  bool table = true;
  for (const Row& r : rows) {
    const TradeoffResult tr = tradeoff_optimize(10000, 10000, ThreatForK(10000, 0.3), p, r.target, grid);
    const bool a_ok = std::abs(double(tr.committee.a) - double(r.a)) <= kCommitteeTolerance * r.a;
    const bool rho_ok = tr.rho == r.rho;
    table &= a_ok && rho_ok;
    detail += Fmt("; S>=%.2f: A=%llu rho=%llu S=%.2f (want A=%llu rho=%llu)", r.target,
                  static_cast<unsigned long long>(tr.committee.a),
                  static_cast<unsigned long long>(tr.rho), tr.speedup,
                  static_cast<unsigned long long>(r.a), static_cast<unsigned long long>(r.rho));
  }
  // The committee sizes alone, independent of the speedup model.
  CommitteeSolver solver(ThreatForK(10000, 0.3));
  detail += Fmt("; solver A at rho 100/250/305: %llu/%llu/%llu",
                static_cast<unsigned long long>(solver.solve(100).params.a),
                static_cast<unsigned long long>(solver.solve(250).params.a),
                static_cast<unsigned long long>(solver.solve(305).params.a));
  return {mobile && table, detail};
}

// ---- 8 ----
Outcome EndToEnd() {
  const auto t0 = Clock::now();
  ProtocolConfig cfg;
  cfg.n = 100;
  cfg.m = 1000;
  cfg.gamma = 0.1;
  cfg.delta = 0.1;
  cfg.rho = 1;
  cfg.seed = 8;
  FaultPlan plan;
  plan.random_client_dropouts = 5;
  plan.random_aggregator_dropouts = 2;
  plan.random_corrupt_clients = 5;
  plan.random_corrupt_aggregators = 3;
  for (std::uint64_t id = 1; id <= 30; id += 3) plan.link_classes[id] = LinkClass::k4g;
  Simulation a(cfg, plan), b(cfg, plan);
  const RunResult& r = a.run();
  b.run();
  const bool field_exact = r.sum == r.oracle_sum;
  const double tol = r.survivors.size() * r.quantizer.step() / 2;
  double worst = 0.0;
  for (std::size_t i = 0; i < r.sum_real.size(); ++i) {
    worst = std::max(worst, std::abs(r.sum_real[i] - r.oracle_real[i]));
  }
  const bool same = TranscriptToJsonl(a.transcript()) == TranscriptToJsonl(b.transcript());
  const bool clean = transcript_audit(a).clean;
  const double secs = Since(t0);
  return {field_exact && worst <= tol && same && secs < kSimBudgetSeconds,
          Fmt("A=%llu t_c=%llu t_r=%llu, |U0|=%zu |A0|=%zu; field sum %s; real error %.3g <= "
              "%.3g; transcripts %s; audit %s; %.2fs for two runs",
              static_cast<unsigned long long>(r.committee.a),
              static_cast<unsigned long long>(r.committee.t_c),
              static_cast<unsigned long long>(r.committee.t_r), r.survivors.size(),
              r.surviving_aggregators.size(), field_exact ? "exact" : "WRONG", worst, tol,
              same ? "identical" : "DIFFER", clean ? "clean" : "not clean", secs)};
}

// ---- 9 ----
Outcome TableTwoOrdering() {
  const CostProfile p;
  const std::uint64_t v = 100000;
  CommitteeSolver solver(ThreatForK(v, 0.3));
  const Choice opa = optimal_A(v, solver, p, Protocol::kOpa, CoarseRhoGrid());
  const Choice dis = optimal_A(v, solver, p, Protocol::kDisAgg, CoarseRhoGrid());
  const double ratio = opa.cost.total() / dis.cost.total();
  const bool ok = opa.committee.a == 461 && dis.committee.a == 830 &&
                  dis.cost.total() < opa.cost.total() && ratio >= kRatioLow &&
                  ratio <= kRatioHigh;
  return {ok, Fmt("OPA A=%llu (rho=%llu), DisAgg A=%llu (rho=%llu), want 461/830; totals %.1fs vs "
                  "%.1fs, ratio %.2f within [%.0f, %.0f]",
                  static_cast<unsigned long long>(opa.committee.a),
                  static_cast<unsigned long long>(opa.committee.rho),
                  static_cast<unsigned long long>(dis.committee.a),
                  static_cast<unsigned long long>(dis.committee.rho), opa.cost.total(),
                  dis.cost.total(), ratio, kRatioLow, kRatioHigh)};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace disagg

int main(int argc, char** argv) {
  using namespace disagg;
  const std::vector<Criterion> all = {
      {"homomorphic exactness", HomomorphicExactness},
      {"threshold sharpness", ThresholdSharpness},
      {"exhaustive privacy", ExhaustivePrivacy},
      {"committee solver vs oracle", CommitteeVsOracle},
      {"download formulas", DownloadFormulas},
      {"speedup reproduction", SpeedupReproduction},
      {"trade-off optimizer", TradeoffOptimizer},
      {"end-to-end protocol run", EndToEnd},
      {"100k ordering claim", TableTwoOrdering},
  };
  int only = 0;
  if (argc == 3 && std::strcmp(argv[1], "--only") == 0) only = std::atoi(argv[2]);
  if (only < 0 || only > static_cast<int>(all.size())) {
    std::fprintf(stderr, "usage: acceptance [--only 1..%zu]\n", all.size());
    return 2;
  }
  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (only != 0 && static_cast<int>(i + 1) != only) continue;
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("[%s] criterion %zu, %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, all[i].name,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
