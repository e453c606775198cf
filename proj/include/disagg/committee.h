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

#ifndef DISAGG_COMMITTEE_H_
#define DISAGG_COMMITTEE_H_

#include <cstdint>
#include <string>
#include <vector>

namespace disagg {

// Threat model for committee sizing. Counts are floor(gamma N) corrupt and
// floor(delta N) dropped clients; the N - floor(delta N) others survive.
struct ThreatConfig {
  std::uint64_t n = 0;
  double gamma = 0.0;
  double delta = 0.0;
  double kappa_c = 40.0;
  double kappa_s = 40.0;
  bool bft = false;

  std::uint64_t corrupt_count() const;
  std::uint64_t dropout_count() const;
  std::uint64_t survivor_count() const { return n - dropout_count(); }
  double p_corrupt() const;  // 2^-kappa_c
  double p_survive() const;  // 2^-kappa_s

  // Throws ParameterError.
  void validate() const;
};

struct CommitteeParams {
  std::uint64_t a = 0;
  std::uint64_t t_c = 0;
  std::uint64_t t_r = 0;
  std::uint64_t rho = 0;

  friend bool operator==(const CommitteeParams&, const CommitteeParams&) = default;
};

struct CommitteeSolution {
  CommitteeParams params;
  double tail_corrupt = 0.0;
  double tail_survive = 0.0;
  double bft_tail = 0.0;
};

// Pr(X = k) for X ~ Hypergeometric(population n, successes k_succ, draws a).
// Zero outside the support.
double hypergeom_pmf(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a,
                     std::uint64_t k);
// Same value from exact big-integer binomials; meant for n up to a few
// thousand.
double hypergeom_pmf_exact(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a,
                           std::uint64_t k);
// Pr(X >= t) and Pr(X <= t), summed from the far end of the tail.
double hypergeom_upper_tail(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a,
                            std::uint64_t t);
double hypergeom_lower_tail(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a,
                            std::int64_t t);

// pmf restricted to the indices where it is numerically non-negligible.
struct PmfWindow {
  std::uint64_t offset = 0;
  std::vector<double> values;
};
PmfWindow hypergeom_window(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a);

// Pr(X_c >= t_c), X_c ~ HG(N, floor(gamma N), A).
double tail_corrupt(std::uint64_t n, double gamma, std::uint64_t a, std::uint64_t t_c);
// Pr(X_s <= t_r - 1), X_s ~ HG(N, N - floor(delta N), A).
double tail_survive(std::uint64_t n, double delta, std::uint64_t a, std::uint64_t t_r);
// Pr(X_c + X_d >= ceil(A/3)) with X_d ~ HG(N, floor(delta N), A), treating
// X_c and X_d as independent.
double bft_tail(std::uint64_t n, double gamma, double delta, std::uint64_t a);

// Minimal committee for a fixed packing factor, searching A upwards and
// taking the smallest t_c that passes the corruption bound at each A.
// Per-A thresholds are cached, so repeated solves for one threat model are
// cheap. Not thread-safe.
class CommitteeSolver {
 public:
  explicit CommitteeSolver(ThreatConfig cfg);

  const ThreatConfig& config() const { return cfg_; }

  // Throws NoSolutionError naming the binding constraint.
  CommitteeSolution solve(std::uint64_t rho);

  // Entry rho (1-based, index 0 unused) holds the minimal A for that
  // packing factor, or 0 if none exists with A <= N.
  std::vector<std::uint64_t> min_committee_table(std::uint64_t rho_limit);

  // Smallest t_c meeting the corruption bound at this A (A if none below).
  std::uint64_t corruption_threshold(std::uint64_t a);
  // Largest t_r < A meeting the survival bound, or 0 if none.
  std::uint64_t max_reconstruction_threshold(std::uint64_t a);
  bool bft_holds(std::uint64_t a);

 private:
  struct Entry {
    std::uint64_t t_c = 0;
    std::uint64_t t_r_max = 0;
    int bft = -1;  // -1 unknown
  };
  Entry& entry(std::uint64_t a);
  CommitteeSolution make_solution(std::uint64_t a, std::uint64_t rho);

  ThreatConfig cfg_;
  std::vector<Entry> cache_;  // index A
  std::uint64_t filled_ = 2;  // entries [0, filled_] computed
};

CommitteeSolution solve_committee(const ThreatConfig& cfg, std::uint64_t rho);
CommitteeSolution min_aggregators(const ThreatConfig& cfg);

}  // namespace disagg

#endif  // DISAGG_COMMITTEE_H_
