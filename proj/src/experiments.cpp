#include "gdnn/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

#include "gdnn/membership.hpp"
#include "gdnn/separation.hpp"

namespace gdnn {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double wall_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// sampler basis order: squared monomials first, then pairs.
const std::array<std::array<int, 4>, 10> kM44Basis = {{{2, 0, 0, 0},
                                                       {0, 2, 0, 0},
                                                       {0, 0, 2, 0},
                                                       {0, 0, 0, 2},
                                                       {1, 1, 0, 0},
                                                       {1, 0, 1, 0},
                                                       {1, 0, 0, 1},
                                                       {0, 1, 1, 0},
                                                       {0, 1, 0, 1},
                                                       {0, 0, 1, 1}}};

// (target, source) entry pairs of the tying step, 1-based positions.
struct TiePair {
  int tr, tc, sr, sc;
};
const std::array<TiePair, 20> kM44Ties = {{{1, 2, 5, 5},   {1, 3, 6, 6},
                                           {1, 4, 7, 7},   {1, 8, 5, 6},
                                           {1, 9, 5, 7},   {1, 10, 6, 7},
                                           {2, 3, 8, 8},   {2, 4, 9, 9},
                                           {2, 6, 5, 8},   {2, 7, 5, 9},
                                           {2, 10, 8, 9},  {3, 4, 10, 10},
                                           {3, 5, 6, 8},   {3, 7, 6, 10},
                                           {3, 9, 8, 10},  {4, 5, 7, 9},
                                           {4, 6, 7, 10},  {4, 8, 9, 10},
                                           {5, 10, 7, 8},  {6, 9, 7, 8}}};

MultiIndex m44_sum(int a, int b) {
  MultiIndex m(4, 0);
  for (int k = 0; k < 4; ++k)
    m[k] = static_cast<std::uint8_t>(kM44Basis[a][k] + kM44Basis[b][k]);
  return m;
}

}  // namespace

void m44_selfcheck() {
  // union-find over the positions of each coincidence class
  std::map<MultiIndex, std::vector<std::pair<int, int>>> classes;
  for (int a = 0; a < 10; ++a)
    for (int b = a; b < 10; ++b) classes[m44_sum(a, b)].emplace_back(a, b);
  if (classes.size() != 35)
    throw std::logic_error("m44: unexpected class count");

  auto key = [](int a, int b) { return a * 10 + b; };
  std::map<int, int> parent;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto& [mono, pos] : classes)
    for (auto [a, b] : pos) parent[key(a, b)] = key(a, b);
  for (const auto& t : kM44Ties) {
    int a = key(std::min(t.tr, t.tc) - 1, std::max(t.tr, t.tc) - 1);
    int b = key(std::min(t.sr, t.sc) - 1, std::max(t.sr, t.sc) - 1);
    if (m44_sum(a / 10, a % 10) != m44_sum(b / 10, b % 10))
      throw std::logic_error("m44: tie crosses coincidence classes");
    parent[find(a)] = find(b);
  }
  for (auto& [mono, pos] : classes) {
    int root = find(key(pos[0].first, pos[0].second));
    for (auto [a, b] : pos)
      if (find(key(a, b)) != root)
        throw std::logic_error("m44: tying leaves a class unmerged");
  }
}

MisocpInstance generate_instance(int n, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("generate_instance: n >= 3");
  CounterRng rng(seed);
  MisocpInstance inst;
  inst.n = n;
  inst.seed = seed;
  inst.c = rng.gaussian_vector(n);
  const int nb = static_cast<int>(std::lround(0.4 * n));
  std::vector<int> pool(n - 1);
  for (int i = 0; i < n - 1; ++i) pool[i] = i + 2;
  for (int k = 0; k < nb; ++k) {
    const int j = k + static_cast<int>(rng.uniform_index(pool.size() - k));
    std::swap(pool[k], pool[j]);
    inst.binary.push_back(pool[k]);
  }
  std::sort(inst.binary.begin(), inst.binary.end());
  return inst;
}

M44Sample generate_m44_vector(CounterRng& rng) {
  static std::once_flag checked;
  std::call_once(checked, m44_selfcheck);

  M44Sample out;
  Eigen::Matrix<double, 10, 10> raw;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) raw(i, j) = rng.gaussian();
  Eigen::Matrix<double, 10, 10> M = raw * raw.transpose();
  for (const auto& t : kM44Ties) {
    M(t.tr - 1, t.tc - 1) = M(t.sr - 1, t.sc - 1);
    M(t.tc - 1, t.tr - 1) = M(t.sc - 1, t.sr - 1);
  }
  out.matrix = M;
  // necessary 2x2 minors at the tied positions reject nearly every draw
  // before the eigenvalue check
  for (const auto& t : kM44Ties) {
    const int i = t.tr - 1, j = t.tc - 1;
    if (M(i, i) * M(j, j) < M(i, j) * M(i, j)) {
      out.min_eigenvalue = -1.0;
      return out;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 10, 10>> es(
      M, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  if (out.min_eigenvalue < -1e-9 * std::abs(M.trace())) return out;

  // all tied classes must agree exactly before reading off y
  auto full = monomial_basis(4, 4);
  out.y = MomentVector(4);
  std::vector<bool> seen(full->size(), false);
  for (int a = 0; a < 10; ++a)
    for (int b = a; b < 10; ++b) {
      const int d = full->index_of(m44_sum(a, b));
      if (seen[d] && out.y.y[d] != M(a, b))
        throw std::logic_error("m44: tied class disagrees after replacement");
      out.y.y[d] = M(a, b);
      seen[d] = true;
    }
  out.accepted = true;
  return out;
}

M44Sample m44_indexed_draw(std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed ^ (0xd1342543de82ef95ULL * (index + 1)));
  return generate_m44_vector(rng);
}

Fig1Report run_fig1(int count, std::uint64_t seed, int workers) {
  ConeSpec spec({{BlockKind::Nonneg, 1}, {BlockKind::SecondOrder, 3}});
  C0Map map = build_c0_map(spec);
  Fig1Report rep;
  rep.seed = seed;
  rep.requested = count;
  rep.min_linear_cases = std::numeric_limits<double>::infinity();

  // draws are indexed, so acceptance is order-deterministic no matter how
  // many workers scan the stream
  std::vector<std::uint64_t> accepted;
  std::mutex mtx;
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> stop_at{~std::uint64_t{0}};
  const int pool_size = std::max(1, workers);
  auto scan = [&]() {
    for (;;) {
      const std::uint64_t base = next.fetch_add(4096);
      if (base >= stop_at.load()) return;
      for (std::uint64_t d = base; d < base + 4096; ++d) {
        M44Sample s = m44_indexed_draw(seed, d);
        if (!s.accepted) continue;
        std::lock_guard<std::mutex> lock(mtx);
        accepted.push_back(d);
        if (static_cast<int>(accepted.size()) >= 4 * count ||
            (static_cast<int>(accepted.size()) >= count &&
             stop_at.load() == ~std::uint64_t{0}))
          stop_at.store(base + 4096);
      }
    }
  };
  if (pool_size == 1) {
    scan();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < pool_size; ++w) pool.emplace_back(scan);
    for (auto& t : pool) t.join();
  }
  std::sort(accepted.begin(), accepted.end());
  if (static_cast<int>(accepted.size()) < count)
    throw std::runtime_error("fig1: sampler stopped early");
  accepted.resize(count);
  rep.attempts = static_cast<int>(accepted.back() + 1);

  std::vector<double> trs_values;
  for (std::uint64_t d : accepted) {
    M44Sample sample = m44_indexed_draw(seed, d);
    MatrixXd X = map.apply(sample.y);
    SeparationDiagnostics diag = evaluate_separation_cases(spec, X);
    Fig1Record rec;
    rec.trs_value = diag.trs_value;
    rec.linear_cases_min =
        std::min({diag.nno_nno, diag.nno_soc, diag.soc_nno,
                  diag.soc_soc_linear});
    rep.records.push_back(rec);
    trs_values.push_back(rec.trs_value);
    rep.min_linear_cases = std::min(rep.min_linear_cases, rec.linear_cases_min);
    if (rec.trs_value < -1e-6) ++rep.negatives;
  }
  std::sort(trs_values.begin(), trs_values.end());
  rep.min_trs = trs_values.front();
  rep.max_trs = trs_values.back();
  rep.median_trs = trs_values[trs_values.size() / 2];
  return rep;
}

namespace {

TableCell solve_cell(const MisocpInstance& inst, const GcppProblem& g,
                     const std::string& variant, int instance_index,
                     const TableOptions& opts) {
  TableCell cell;
  cell.n = inst.n;
  cell.instance = instance_index;
  cell.variant = variant;
  if ((variant == "nn" && inst.n > opts.nn_cap) ||
      (variant != "misocp" && variant != "nn" && inst.n > opts.other_cap)) {
    cell.skipped = true;
    cell.status = "cap_exceeded";
    return cell;
  }
  const double t0 = wall_seconds();
  if (variant == "misocp") {
    BruteForceResult r = misocp_bruteforce(inst);
    cell.value = r.value;
    cell.status = r.failed_branches == 0 ? "optimal" : "partial";
  } else if (variant == "bd") {
    CounterRng rng(inst.seed ^ 0x9e3779b97f4a7c15ULL);
    ExchangeParams params;
    ExchangeResult r = solve_bd_exchange(g, params, rng);
    cell.value = r.value;
    cell.status = to_string(r.status);
  } else {
    RelaxationBuild b =
        build_relaxation(g, relaxation_variant_from_string(variant));
    Solution s = solve(b.program);
    cell.value = s.primal_obj;
    // the nn relaxation has no strictly feasible point; accept its solves
    // at the table tolerance
    const double gate = variant == "nn" ? 1e-5 : 1e-6;
    cell.status = s.usable(gate) ? (s.status == SolveStatus::Optimal
                                        ? "optimal"
                                        : "near_optimal")
                                 : to_string(s.status);
  }
  cell.seconds = wall_seconds() - t0;
  return cell;
}

}  // namespace

TableReport run_tables(const TableOptions& opts, std::uint64_t seed) {
  TableReport rep;
  rep.seed = seed;

  struct Job {
    MisocpInstance inst;
    GcppProblem g;
    int instance_index;
    std::string variant;
  };
  std::vector<Job> jobs;
  for (int n : opts.n_list)
    for (int k = 0; k < opts.seeds_per_n; ++k) {
      MisocpInstance inst =
          generate_instance(n, seed + 1000 * static_cast<std::uint64_t>(n) + k);
      GcppProblem g = burer_reformulate(inst);
      for (const auto& v : opts.variants)
        jobs.push_back({inst, g, k, v});
    }

  std::vector<TableCell> cells(jobs.size());
  if (opts.workers <= 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j)
      cells[j] = solve_cell(jobs[j].inst, jobs[j].g, jobs[j].variant,
                            jobs[j].instance_index, opts);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t j = next.fetch_add(1);
        if (j >= jobs.size()) return;
        cells[j] = solve_cell(jobs[j].inst, jobs[j].g, jobs[j].variant,
                              jobs[j].instance_index, opts);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < opts.workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  rep.cells = std::move(cells);

  // orderings per instance
  std::map<std::pair<int, int>, std::map<std::string, const TableCell*>> by;
  for (const auto& c : rep.cells) by[{c.n, c.instance}][c.variant] = &c;
  for (auto& [key, m] : by) {
    auto val = [&](const std::string& v) -> std::optional<double> {
      auto it = m.find(v);
      if (it == m.end() || it->second->skipped) return std::nullopt;
      return it->second->value;
    };
    auto mis = val("misocp"), nn = val("nn"), zvp = val("zvp"), bd = val("bd"),
         sdp = val("sdp");
    auto tol = [&](double v) { return opts.sandwich_tol * (1.0 + std::abs(v)); };
    auto check_le = [&](std::optional<double> a, std::optional<double> b) {
      if (a && b && *a > *b + tol(*b)) ++rep.ordering_violations;
    };
    check_le(sdp, zvp);
    check_le(zvp, nn);
    check_le(nn, mis);
    check_le(zvp, mis);
    check_le(sdp, bd);
    check_le(bd, mis);
    if (bd && nn) {
      ++rep.bd_le_nn_total;
      if (*bd <= *nn + tol(*nn)) ++rep.bd_le_nn_count;
    }
    if (zvp && mis) {
      ++rep.zvp_tight_total;
      if (*zvp >= *mis - 1e-4 * (1.0 + std::abs(*mis))) ++rep.zvp_tight_count;
    }
  }
  return rep;
}

std::string table_report_csv(const TableReport& rep) {
  // one line per (n, instance) with value/time columns per variant
  const std::vector<std::string> variants = {"misocp", "nn", "zvp", "bd",
                                             "sdp"};
  std::map<std::pair<int, int>, std::map<std::string, const TableCell*>> by;
  for (const auto& c : rep.cells) by[{c.n, c.instance}][c.variant] = &c;
  std::ostringstream os;
  os << "n,no";
  for (const auto& v : variants) os << "," << v << "_value," << v << "_time";
  os << "\n";
  os.setf(std::ios::fixed);
  os.precision(6);
  for (auto& [key, m] : by) {
    os << key.first << "," << key.second + 1;
    for (const auto& v : variants) {
      auto it = m.find(v);
      if (it == m.end()) {
        os << ",,";
      } else if (it->second->skipped) {
        os << ",OOM,";
      } else {
        os << "," << it->second->value << "," << it->second->seconds;
      }
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace gdnn
