#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "wavelab/corpus.hpp"
#include "wavelab/littlewood_paley.hpp"

namespace wavelab {

struct InequalityReport {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
  std::vector<double> ratios;  // per corpus entry (or per block), LHS / RHS
  double max_ratio = 0.0;
  double min_ratio = std::numeric_limits<double>::infinity();
  std::uint64_t corpus_seed = 0;
  int dim = 0;
  int N = 0;
  int rho = 0;
  // Bound the max ratio is compared against; infinity means "finite is enough".
  double bound = std::numeric_limits<double>::infinity();
  bool pass = false;

  void add(double lhs, double rhs);
  void finish();
};

// JSON {name, params, max_ratio, min_ratio, corpus_seed, grid, pass}.
std::string report_to_json(const InequalityReport& report);

struct CorpusInfo {
  const std::vector<CorpusEntry>* entries;
  std::uint64_t seed;
};

// ||u||_{W^{s,p}} <= C ||u||_{W^{t,p0}}^{1-alpha} ||u||_{L^{p1}}^alpha with alpha
// solved from -s/d + 1/p = (1-alpha)(1/p0 - t/d) + alpha/p1. Throws unless
// alpha is in (0, 1) and s <= (1 - alpha) t.
double gn_alpha(int dim, double s, double t, double p, double p0, double p1);
InequalityReport gn_check(const CorpusInfo& corpus, double s, double t, double p, double p0, double p1);

// ||f(u)||_{B^s_{q,r}} <= C ||u||_{B^s_{q1,r}} || |u|^{p-1} ||_{L^{q2}} with
// f(x) = |x|^{p-1} x. Requires 1/q = 1/q1 + 1/q2 and s in (0, 1).
InequalityReport chain_rule_check(const CorpusInfo& corpus, double s, double p_exponent, double q, double q1,
                                  double q2, double r, bool homogeneous = false);

// ||fg||_{Bdot^s_{p,r}} <= C (||f||_{Bdot^s_{p1,r}} ||g||_{L^{p1'}} + ||f||_{L^{p2}} ||g||_{Bdot^s_{p2',r}})
// with the primed exponents fixed by 1/p1 + 1/p1' = 1/p2 + 1/p2' = 1/p.
InequalityReport tame_check(const std::vector<std::pair<SpectralField, SpectralField>>& pairs, std::uint64_t seed,
                            double s, double p, double r, double p1, double p2);

// Empty string when the embedding source -> target is one of the admissible
// Sobolev-Besov embeddings in dimension d, otherwise the reason it is not.
std::string embedding_violation(const NormSpec& source, const NormSpec& target, int dim);
// Ratio ||u||_target / ||u||_source; throws for inadmissible embeddings.
InequalityReport embedding_check(const CorpusInfo& corpus, const NormSpec& source, const NormSpec& target);

// Per nonzero block: ||Delta_j u||_q / (2^{jd(1/p-1/q)} ||Delta_j u||_p), or
// with derivative_order k > 0, || |D|^k Delta_j u ||_p / (2^{jk} ||Delta_j u||_p)
// for j >= 1. Requires 1 < p <= q < infinity in the first form.
InequalityReport bernstein_check(const CorpusInfo& corpus, double p, double q, double derivative_order = 0.0,
                                 const BumpProfile& phi = BumpProfile::smooth_step());

// || (sum_j |Delta_j f|^2)^{1/2} ||_p / ||f||_p.
InequalityReport square_function_check(const CorpusInfo& corpus, double p,
                                       const BumpProfile& phi = BumpProfile::smooth_step());

// ||f||_{B^s_{2,2}} / ||f||_{H^s}.
InequalityReport besov_sobolev_check(const CorpusInfo& corpus, double s,
                                     const BumpProfile& phi = BumpProfile::smooth_step());

// Exact bracket [lo, hi] of B^s_{2,2}/H^s over all fields on the grid, from
// the single-mode ratios sqrt(sum_j 2^{2js} w_j(n)^2) / <n>^s.
std::pair<double, double> besov_sobolev_bracket(const TorusGrid& grid, double s,
                                                const BumpProfile& phi = BumpProfile::smooth_step());

// Exact bracket of the p = 2 square-function ratio: sqrt(sum_j w_j(n)^2) over
// retained modes.
std::pair<double, double> square_function_bracket(const TorusGrid& grid,
                                                  const BumpProfile& phi = BumpProfile::smooth_step());

// The fixed set of checks run by the inequalities mode: Bernstein (both forms),
// square function at p in {2, 4, 6}, B^s_{p,1} -> W^{s,p} -> B^s_{p,inf},
// Gagliardo-Nirenberg and the chain rule at the energy-argument exponents for
// the nonlinearity power p (which must exceed 3), the tame product estimate
// and B^s_{2,2} against H^s.
std::vector<InequalityReport> standard_inequality_battery(const CorpusInfo& corpus,
                                                          const std::vector<std::pair<SpectralField, SpectralField>>& pairs,
                                                          double nonlinearity_p);

}  // namespace wavelab
