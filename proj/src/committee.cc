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

#include "disagg/committee.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

#include "disagg/errors.h"

namespace disagg {
namespace {

using boost::multiprecision::cpp_int;

// Counts like gamma * N are usually meant to be exact; absorb the binary
// representation error so 0.29 * 100 floors to 29.
std::uint64_t FloorCount(double frac, std::uint64_t n) {
  const double x = frac * static_cast<double>(n);
  return static_cast<std::uint64_t>(std::floor(x + 1e-9 * std::max(1.0, x)));
}

double LogChoose(std::uint64_t n, std::uint64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

struct Support {
  std::uint64_t lo;
  std::uint64_t hi;
};

Support SupportOf(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a) {
  const std::uint64_t fail = n - k_succ;
  return {a > fail ? a - fail : 0, std::min(a, k_succ)};
}

void CheckArgs(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a) {
  if (k_succ > n || a > n) {
    throw ParameterError("hypergeometric: need K <= N and A <= N");
  }
}

double LogPmf(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a,
              std::uint64_t k) {
  return LogChoose(k_succ, k) + LogChoose(n - k_succ, a - k) - LogChoose(n, a);
}

// pmf(k+1) / pmf(k)
double RatioUp(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a,
               std::uint64_t k) {
  const double num = static_cast<double>(k_succ - k) * static_cast<double>(a - k);
  const double den = static_cast<double>(k + 1) *
                     static_cast<double>(n - k_succ - a + k + 1);
  return num / den;
}

// pmf(k-1) / pmf(k)
double RatioDown(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a,
                 std::uint64_t k) {
  const double num = static_cast<double>(k) * static_cast<double>(n - k_succ - a + k);
  const double den = static_cast<double>(k_succ - k + 1) *
                     static_cast<double>(a - k + 1);
  return num / den;
}

struct Neumaier {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

std::uint64_t Mode(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a,
                   Support s) {
  const long double m = (static_cast<long double>(a) + 1) *
                        (static_cast<long double>(k_succ) + 1) /
                        (static_cast<long double>(n) + 2);
  auto mode = static_cast<std::uint64_t>(std::floor(m));
  return std::clamp(mode, s.lo, s.hi);
}

// Sum pmf over [from, s.hi], from >= mode, walking away from the mode.
double SumUpward(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a,
                 Support s, std::uint64_t from) {
  double term = std::exp(LogPmf(n, k_succ, a, from));
  Neumaier acc;
  for (std::uint64_t k = from;; ++k) {
    acc.add(term);
    if (k == s.hi || term == 0.0) break;
    term *= RatioUp(n, k_succ, a, k);
    if (term < acc.sum * 1e-18) break;
  }
  return acc.value();
}

// Sum pmf over [s.lo, from], from <= mode, walking away from the mode.
double SumDownward(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a,
                   Support s, std::uint64_t from) {
  double term = std::exp(LogPmf(n, k_succ, a, from));
  Neumaier acc;
  for (std::uint64_t k = from;; --k) {
    acc.add(term);
    if (k == s.lo || term == 0.0) break;
    term *= RatioDown(n, k_succ, a, k);
    if (term < acc.sum * 1e-18) break;
  }
  return acc.value();
}

cpp_int Binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  cpp_int r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

double Clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

std::uint64_t ThreatConfig::corrupt_count() const { return FloorCount(gamma, n); }
std::uint64_t ThreatConfig::dropout_count() const { return FloorCount(delta, n); }
double ThreatConfig::p_corrupt() const { return std::exp2(-kappa_c); }
double ThreatConfig::p_survive() const { return std::exp2(-kappa_s); }

void ThreatConfig::validate() const {
  if (n < 3) throw ParameterError("threat: N must be at least 3");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ParameterError("threat: gamma must lie in [0, 1)");
  if (!(delta >= 0.0 && delta < 1.0)) throw ParameterError("threat: delta must lie in [0, 1)");
  if (!(gamma + delta < 1.0)) throw ParameterError("threat: gamma + delta must be below 1");
  if (!(kappa_c > 0.0) || !(kappa_s > 0.0) || !std::isfinite(kappa_c) ||
      !std::isfinite(kappa_s)) {
    throw ParameterError("threat: kappa values must be positive");
  }
  if (corrupt_count() + dropout_count() >= n) {
    throw ParameterError("threat: corrupt and dropped clients cover the population");
  }
}

double hypergeom_pmf(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a,
                     std::uint64_t k) {
  CheckArgs(n, k_succ, a);
  const Support s = SupportOf(n, k_succ, a);
  if (k < s.lo || k > s.hi) return 0.0;
  return Clamp01(std::exp(LogPmf(n, k_succ, a, k)));
}

double hypergeom_pmf_exact(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a,
                           std::uint64_t k) {
  CheckArgs(n, k_succ, a);
  const Support s = SupportOf(n, k_succ, a);
  if (k < s.lo || k > s.hi) return 0.0;
  const cpp_int num = Binomial(k_succ, k) * Binomial(n - k_succ, a - k);
  const cpp_int den = Binomial(n, a);
  // Scale to 64 significant bits before converting.
  const auto shift = static_cast<long>(msb(den)) - static_cast<long>(msb(num)) + 64;
  const cpp_int q = shift >= 0 ? cpp_int((num << shift) / den) : cpp_int(num / (den << -shift));
  return std::ldexp(q.convert_to<double>(), static_cast<int>(-shift));
}

double hypergeom_upper_tail(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a,
                            std::uint64_t t) {
  CheckArgs(n, k_succ, a);
  const Support s = SupportOf(n, k_succ, a);
  if (t <= s.lo) return 1.0;
  if (t > s.hi) return 0.0;
  const std::uint64_t mode = Mode(n, k_succ, a, s);
  if (t > mode) return Clamp01(SumUpward(n, k_succ, a, s, t));
  return Clamp01(1.0 - SumDownward(n, k_succ, a, s, t - 1));
}

double hypergeom_lower_tail(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a,
                            std::int64_t t) {
  CheckArgs(n, k_succ, a);
  if (t < 0) return 0.0;
  const auto tu = static_cast<std::uint64_t>(t);
  const Support s = SupportOf(n, k_succ, a);
  if (tu < s.lo) return 0.0;
  if (tu >= s.hi) return 1.0;
  const std::uint64_t mode = Mode(n, k_succ, a, s);
  if (tu < mode) return Clamp01(SumDownward(n, k_succ, a, s, tu));
  return Clamp01(1.0 - SumUpward(n, k_succ, a, s, tu + 1));
}

PmfWindow hypergeom_window(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a) {
  CheckArgs(n, k_succ, a);
  const Support s = SupportOf(n, k_succ, a);
  const std::uint64_t mode = Mode(n, k_succ, a, s);
  const double peak = std::exp(LogPmf(n, k_succ, a, mode));
  const double floor_v = peak * 1e-30;
  std::vector<double> down;
  double term = peak;
  for (std::uint64_t k = mode; k > s.lo;) {
    term *= RatioDown(n, k_succ, a, k);
    --k;
    if (term < floor_v) break;
    down.push_back(term);
  }
  PmfWindow w;
  w.offset = mode - down.size();
  w.values.assign(down.rbegin(), down.rend());
  w.values.push_back(peak);
  term = peak;
  for (std::uint64_t k = mode; k < s.hi; ++k) {
    term *= RatioUp(n, k_succ, a, k);
    if (term < floor_v) break;
    w.values.push_back(term);
  }
  return w;
}

double tail_corrupt(std::uint64_t n, double gamma, std::uint64_t a, std::uint64_t t_c) {
  return hypergeom_upper_tail(n, FloorCount(gamma, n), a, t_c);
}

double tail_survive(std::uint64_t n, double delta, std::uint64_t a, std::uint64_t t_r) {
  const std::uint64_t survivors = n - FloorCount(delta, n);
  return hypergeom_lower_tail(n, survivors, a, static_cast<std::int64_t>(t_r) - 1);
}

double bft_tail(std::uint64_t n, double gamma, double delta, std::uint64_t a) {
  const std::uint64_t kc = FloorCount(gamma, n);
  const std::uint64_t kd = FloorCount(delta, n);
  CheckArgs(n, kc, a);
  CheckArgs(n, kd, a);
  const std::uint64_t target = (a + 2) / 3;
  if (target == 0) return 1.0;
  const PmfWindow wc = hypergeom_window(n, kc, a);
  const PmfWindow wd = hypergeom_window(n, kd, a);
  // suffix[j] = Pr(X_d >= wd.offset + j)
  std::vector<double> suffix(wd.values.size() + 1, 0.0);
  {
    Neumaier acc;
    for (std::size_t j = wd.values.size(); j-- > 0;) {
      acc.add(wd.values[j]);
      suffix[j] = acc.value();
    }
  }
  Neumaier total;
  for (std::size_t i = 0; i < wc.values.size(); ++i) {
    const std::uint64_t xc = wc.offset + i;
    double tail_d;
    if (xc >= target) {
      tail_d = 1.0;
    } else {
      const std::uint64_t need = target - xc;
      if (need <= wd.offset) {
        tail_d = suffix[0];
      } else if (need - wd.offset >= wd.values.size()) {
        tail_d = 0.0;
      } else {
        tail_d = suffix[need - wd.offset];
      }
    }
    total.add(wc.values[i] * tail_d);
  }
  return Clamp01(total.value());
}

CommitteeSolver::CommitteeSolver(ThreatConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  cache_.resize(3);
}

CommitteeSolver::Entry& CommitteeSolver::entry(std::uint64_t a) {
  if (a < 3 || a > cfg_.n) throw ParameterError("committee: A out of range");
  const std::uint64_t n = cfg_.n;
  const std::uint64_t kc = cfg_.corrupt_count();
  const std::uint64_t ks = cfg_.survivor_count();
  const double pc = cfg_.p_corrupt();
  const double ps = cfg_.p_survive();
  if (a > filled_) cache_.resize(a + 1);
  // Both thresholds are nondecreasing in A, so each new entry resumes from
  // its predecessor.
  while (filled_ < a) {
    const std::uint64_t cur = filled_ + 1;
    const Entry& prev = cache_[filled_];
    Entry e;
    std::uint64_t tc = std::max<std::uint64_t>(1, prev.t_c);
    while (tc < cur && !(hypergeom_upper_tail(n, kc, cur, tc) < pc)) ++tc;
    e.t_c = tc;
    // Largest u with Pr(X_s <= u) < P_s; t_r = u + 1.
    std::int64_t u = std::max<std::int64_t>(static_cast<std::int64_t>(prev.t_r_max) - 1, -1);
    while (u + 1 < static_cast<std::int64_t>(cur) &&
           hypergeom_lower_tail(n, ks, cur, u + 1) < ps) {
      ++u;
    }
    e.t_r_max = static_cast<std::uint64_t>(u + 1);
    cache_[cur] = e;
    filled_ = cur;
  }
  return cache_[a];
}

std::uint64_t CommitteeSolver::corruption_threshold(std::uint64_t a) {
  return entry(a).t_c;
}

std::uint64_t CommitteeSolver::max_reconstruction_threshold(std::uint64_t a) {
  const std::uint64_t t = std::min(entry(a).t_r_max, a - 1);
  return t;
}

bool CommitteeSolver::bft_holds(std::uint64_t a) {
  Entry& e = entry(a);
  if (e.bft < 0) {
    e.bft = bft_tail(cfg_.n, cfg_.gamma, cfg_.delta, a) < cfg_.p_corrupt() ? 1 : 0;
  }
  return e.bft == 1;
}

CommitteeSolution CommitteeSolver::make_solution(std::uint64_t a, std::uint64_t rho) {
  CommitteeSolution sol;
  sol.params.a = a;
  sol.params.t_c = entry(a).t_c;
  sol.params.t_r = sol.params.t_c + rho;
  sol.params.rho = rho;
  sol.tail_corrupt = tail_corrupt(cfg_.n, cfg_.gamma, a, sol.params.t_c);
  sol.tail_survive = tail_survive(cfg_.n, cfg_.delta, a, sol.params.t_r);
  sol.bft_tail = bft_tail(cfg_.n, cfg_.gamma, cfg_.delta, a);
  return sol;
}

CommitteeSolution CommitteeSolver::solve(std::uint64_t rho) {
  if (rho < 1) throw ParameterError("committee: rho must be at least 1");
  std::string binding = "committee size (rho + 2 exceeds N)";
  for (std::uint64_t a = rho + 2; a <= cfg_.n; ++a) {
    const Entry& e = entry(a);
    if (e.t_c + rho >= a) {
      binding = "corruption bound (t_c + rho must stay below A)";
      continue;
    }
    if (e.t_c + rho > e.t_r_max) {
      binding = "survival bound";
      continue;
    }
    if (cfg_.bft && !bft_holds(a)) {
      binding = "bft bound";
      continue;
    }
    return make_solution(a, rho);
  }
  throw NoSolutionError("committee: no feasible A <= N for rho = " +
                            std::to_string(rho) + "; binding: " + binding,
                        binding);
}

std::vector<std::uint64_t> CommitteeSolver::min_committee_table(std::uint64_t rho_limit) {
  std::vector<std::uint64_t> table(rho_limit + 1, 0);
  std::uint64_t covered = 0;  // rho values in [1, covered] already assigned
  for (std::uint64_t a = 3; a <= cfg_.n && covered < rho_limit; ++a) {
    const Entry& e = entry(a);
    const std::uint64_t tr = std::min(e.t_r_max, a - 1);
    if (tr <= e.t_c) continue;
    const std::uint64_t reach = std::min(tr - e.t_c, rho_limit);
    if (reach <= covered) continue;
    if (cfg_.bft && !bft_holds(a)) continue;
    for (std::uint64_t r = covered + 1; r <= reach; ++r) table[r] = a;
    covered = reach;
  }
  return table;
}

CommitteeSolution solve_committee(const ThreatConfig& cfg, std::uint64_t rho) {
  CommitteeSolver solver(cfg);
  return solver.solve(rho);
}

CommitteeSolution min_aggregators(const ThreatConfig& cfg) {
  return solve_committee(cfg, 1);
}

}  // namespace disagg
