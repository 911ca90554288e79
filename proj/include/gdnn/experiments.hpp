#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gdnn/forms.hpp"
#include "gdnn/gcpp.hpp"
#include "gdnn/rng.hpp"

namespace gdnn {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Random instance of the mixed 0-1 SOCP family: round(0.4 n) binary
/// indices drawn from {2,...,n} without replacement, c i.i.d. standard
/// normal.
MisocpInstance generate_instance(int n, std::uint64_t seed);

struct M44Sample {
  bool accepted = false;
  MomentVector y;          // over I(4,4) when accepted
  Eigen::MatrixXd matrix;  // the tied 10x10 matrix
  double min_eigenvalue = 0.0;
};

/// One sampler draw: a 10x10 Wishart matrix with the 20 tied entry
/// pairs overwritten, accepted iff still psd. The tying covers every
/// moment-consistency class of M_{4,4}(y) (verified by enumeration), so an
/// accepted matrix reads off as a valid moment vector.
M44Sample generate_m44_vector(CounterRng& rng);

/// Verifies that the hard-coded tie table merges every coincidence class of
/// the squares-then-pairs basis; throws std::logic_error otherwise.
void m44_selfcheck();

struct Fig1Record {
  double trs_value = 0.0;        // SocSoc TRS optimal value of the C0 lift
  double linear_cases_min = 0.0;  // min over the non-TRS case families
};

struct Fig1Report {
  std::uint64_t seed = 0;
  int requested = 0;
  int attempts = 0;  // rejection-sampling draws
  std::vector<Fig1Record> records;
  double min_trs = 0.0;
  double median_trs = 0.0;
  double max_trs = 0.0;
  int negatives = 0;             // trs values below -1e-6
  double min_linear_cases = 0.0;
  std::string version = kToolkitVersion;
};

/// One indexed draw of the rejection sampler (used by the experiment
/// harness; deterministic in (seed, index) for any worker count).
M44Sample m44_indexed_draw(std::uint64_t seed, std::uint64_t index);

/// Inclusion experiment over K = R+ x L^3: tied-Wishart moment samples,
/// the C0 lift, and the soc-vs-soc TRS value of each lifted matrix.
/// Deterministic in the seed regardless of the worker count.
Fig1Report run_fig1(int count, std::uint64_t seed, int workers = 1);

struct TableCell {
  int n = 0;
  int instance = 0;   // seed index within the sweep
  std::string variant;
  double value = 0.0;
  double seconds = 0.0;
  std::string status;
  bool skipped = false;  // size cap exceeded, reported as OOM in the csv
};

struct TableReport {
  std::uint64_t seed = 0;
  std::vector<TableCell> cells;
  int ordering_violations = 0;
  int bd_le_nn_count = 0;   // conjecture-consistent orderings observed
  int bd_le_nn_total = 0;
  int zvp_tight_count = 0;  // zvp within 1e-4 of the misocp optimum
  int zvp_tight_total = 0;
  std::string version = kToolkitVersion;
};

struct TableOptions {
  std::vector<int> n_list = {5, 10};
  int seeds_per_n = 5;
  std::vector<std::string> variants = {"misocp", "nn", "zvp", "bd", "sdp"};
  int nn_cap = 5;      // skip nn above this n
  int other_cap = 30;  // skip zvp/bd/sdp above this n
  int workers = 1;
  double sandwich_tol = 1e-5;
};

TableReport run_tables(const TableOptions& opts, std::uint64_t seed);

std::string table_report_csv(const TableReport& rep);

}  // namespace gdnn
