#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "rankup/basis.hpp"
#include "rankup/cholesky.hpp"
#include "rankup/error.hpp"
#include "rankup/update.hpp"

namespace rankup::bench {

enum class DataMode { RANDOM_DESIGN, EMBEDDED };
enum class Distribution { GAUSSIAN, UNIFORM };

// One matrix size. EMBEDDED data needs the (d, n) that produced s.
struct SizeSpec {
  std::size_t s = 0;
  std::optional<std::pair<std::size_t, std::size_t>> degree;

  static SizeSpec from_s(std::size_t s) { return {s, std::nullopt}; }
  static SizeSpec from_basis(std::size_t d, std::size_t n) {
    return {basis_size(d, n), std::make_pair(d, n)};
  }
};

struct BenchConfig {
  std::size_t S = 2000;
  std::vector<SizeSpec> sizes{SizeSpec::from_basis(8, 5)};
  std::vector<std::size_t> ks{1, 2, 3, 4, 5, 10, 20, 30, 40, 50, 100, 200, 300, 400, 500, 750, 1000};
  std::size_t reps = 200;
  // A cell whose warm-up run exceeds rep_budget_s seconds runs
  // reps / rep_reduction repetitions instead.
  double rep_budget_s = 0.25;
  std::size_t rep_reduction = 4;
  // Upper bound on timed seconds per cell, 0 = unbounded.
  double max_cell_time_s = 0.0;
  std::uint64_t seed = 42;
  DataMode data_mode = DataMode::RANDOM_DESIGN;
  Distribution distribution = Distribution::GAUSSIAN;
  std::vector<UpdateMethod> methods{UpdateMethod::DI, UpdateMethod::ISM, UpdateMethod::WMI};
  // Added to M_n(mu_N) only in cells with N = S - k <= s.
  double ridge = 0.0;
  bool warmup = true;
  bool serial_timing = true;
};

struct BenchRecord {
  std::size_t s = 0;
  std::size_t k = 0;
  UpdateMethod method = UpdateMethod::DI;
  std::size_t reps = 0;
  double mean_time_s = std::numeric_limits<double>::quiet_NaN();
  double median_time_s = std::numeric_limits<double>::quiet_NaN();
  double error_frobenius = std::numeric_limits<double>::quiet_NaN();
  double cond = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t flops = 0;
  std::string failure;  // empty when the cell ran

  [[nodiscard]] bool ok() const noexcept { return failure.empty(); }
};

inline void validate(const BenchConfig& config) {
  auto fail = [](const std::string& why) { throw Error(Errc::invalid_config, why); };
  if (config.S == 0) fail("S must be positive");
  if (config.sizes.empty()) fail("sizes must not be empty");
  if (config.ks.empty()) fail("ks must not be empty");
  if (config.methods.empty()) fail("methods must not be empty");
  if (config.reps == 0) fail("reps must be positive");
  if (config.rep_reduction == 0) fail("rep_reduction must be positive");
  if (config.ridge < 0) fail("ridge must be non-negative");
  for (auto m : config.methods) {
    if (m == UpdateMethod::AUTO) fail("methods must be concrete (DI, ISM, WMI)");
  }
  for (const auto& size : config.sizes) {
    if (size.s == 0) fail("matrix size must be positive");
    if (config.data_mode == DataMode::EMBEDDED && !size.degree) {
      fail("EMBEDDED data needs sizes given as (d, n)");
    }
    for (auto k : config.ks) {
      if (k == 0) fail("k must be positive");
      if (k >= config.S) fail("k = " + std::to_string(k) + " leaves no fitting samples");
      if (config.S - k <= size.s && config.ridge == 0.0) {
        fail("cell s = " + std::to_string(size.s) + ", k = " + std::to_string(k) +
             " has N = S - k <= s; set a positive ridge");
      }
    }
  }
}

// S x s matrix of design rows, deterministic in (seed, size).
inline Matrix gen_dataset(std::size_t S, const SizeSpec& size, std::uint64_t seed,
                          DataMode mode, Distribution distribution = Distribution::GAUSSIAN) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(size.s)};
  std::mt19937_64 rng(seq);
  const auto rows = static_cast<Eigen::Index>(S);
  if (mode == DataMode::RANDOM_DESIGN) {
    const auto cols = static_cast<Eigen::Index>(size.s);
    Matrix X(rows, cols);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        X(i, j) = distribution == Distribution::GAUSSIAN ? gauss(rng) : unit(rng);
      }
    }
    return X;
  }
  if (!size.degree) throw Error(Errc::invalid_config, "EMBEDDED data needs (d, n)");
  const MonomialBasis basis(size.degree->first, size.degree->second);
  std::uniform_real_distribution<double> cube(-1.0, 1.0);
  std::vector<double> points(S * basis.dimension());
  for (auto& p : points) p = cube(rng);
  return basis.vectorize_batch(std::span<const double>(points));
}

// lambda_max / lambda_min of a symmetric positive definite matrix.
inline double condition_number(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(M, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::conditioning_failure, "eigen-decomposition did not converge");
  }
  const auto& values = solver.eigenvalues();
  if (!values.allFinite()) throw Error(Errc::conditioning_failure, "non-finite eigenvalues");
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

// ||I - A B||_F
inline double inverse_residual(const Matrix& A, const Matrix& B) {
  Matrix residual = Matrix::Identity(A.rows(), A.cols());
  residual.noalias() -= A * B;
  return residual.norm();
}

// Everything a cell needs before any timing: the denormalized matrix and
// inverse fitted on the first N rows, the batch of the last k rows, and the
// updated raw matrix the residual is measured against.
struct CellFixture {
  std::size_t s = 0;
  std::size_t k = 0;
  Matrix raw;          // N M_n(mu_N)
  Matrix raw_inverse;  // M_n(mu_N)^{-1} / N
  Matrix batch;        // k x s
  Matrix updated;      // raw + batch^T batch
  double cond = std::numeric_limits<double>::quiet_NaN();
};

inline CellFixture make_fixture(Matrix raw, Matrix batch, bool with_cond = true) {
  CellFixture fx;
  fx.s = static_cast<std::size_t>(raw.rows());
  fx.k = static_cast<std::size_t>(batch.rows());
  fx.raw_inverse = spd_invert(raw);
  fx.updated = raw;
  fx.updated.noalias() += batch.transpose() * batch;
  if (with_cond) fx.cond = condition_number(raw);
  fx.raw = std::move(raw);
  fx.batch = std::move(batch);
  return fx;
}

inline CellFixture prepare_cell(const Matrix& data, std::size_t k, double ridge,
                                bool with_cond = true) {
  const auto total = static_cast<std::size_t>(data.rows());
  const std::size_t s = static_cast<std::size_t>(data.cols());
  if (k == 0 || k >= total) throw Error(Errc::invalid_config, "k out of range for the dataset");
  const std::size_t N = total - k;
  const double lambda = N <= s ? ridge : 0.0;
  if (N <= s && lambda == 0.0) throw Error(Errc::rank_deficient, "N <= s without ridge");
  const auto top = data.topRows(static_cast<Eigen::Index>(N));
  Matrix normalized = Matrix::Zero(data.cols(), data.cols());
  normalized.selfadjointView<Eigen::Lower>().rankUpdate(top.transpose(), 1.0 / static_cast<double>(N));
  normalized.diagonal().array() += lambda;
  normalized.triangularView<Eigen::StrictlyUpper>() = normalized.transpose();

  CellFixture fx;
  fx.s = s;
  fx.k = k;
  if (with_cond) fx.cond = condition_number(normalized);
  fx.raw_inverse = spd_invert(normalized) / static_cast<double>(N);
  fx.raw = normalized * static_cast<double>(N);
  fx.batch = data.bottomRows(static_cast<Eigen::Index>(k));
  fx.updated = fx.raw;
  fx.updated.noalias() += fx.batch.transpose() * fx.batch;
  return fx;
}

namespace detail {

using Clock = std::chrono::steady_clock;

// Runs one update on a fresh copy; only the kernel is inside the clock.
inline double timed_run(const CellFixture& fx, UpdateMethod method, Matrix& result,
                        FlopLedger& ledger) {
  if (method == UpdateMethod::DI) {
    Matrix raw = fx.raw;
    const auto start = Clock::now();
    result = di_update_inplace(raw, fx.batch, ledger);
    return std::chrono::duration<double>(Clock::now() - start).count();
  }
  result = fx.raw_inverse;
  const auto start = Clock::now();
  if (method == UpdateMethod::ISM) {
    ism_update_inplace(result, fx.batch, ledger);
  } else {
    wmi_update_inplace(result, fx.batch, ledger);
  }
  return std::chrono::duration<double>(Clock::now() - start).count();
}

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace detail

inline std::size_t planned_reps(const BenchConfig& config, double warmup_s) {
  std::size_t reps = config.reps;
  if (warmup_s > config.rep_budget_s) reps = std::max<std::size_t>(1, reps / config.rep_reduction);
  if (config.max_cell_time_s > 0.0 && warmup_s > 0.0) {
    const auto fit = static_cast<std::size_t>(config.max_cell_time_s / warmup_s);
    reps = std::min(reps, std::max<std::size_t>(1, fit));
  }
  return reps;
}

// Times one method on a prepared cell. Kernel failures land in
// BenchRecord::failure.
inline BenchRecord time_method(const CellFixture& fx, UpdateMethod method,
                               const BenchConfig& config) {
  BenchRecord record;
  record.s = fx.s;
  record.k = fx.k;
  record.method = method;
  record.cond = fx.cond;
  try {
    Matrix result;
    FlopLedger ledger;
    std::vector<double> times;
    double warm = 0.0;
    if (config.warmup) {
      warm = detail::timed_run(fx, method, result, ledger);
      record.flops = ledger.count();
    }
    const std::size_t reps = config.warmup ? planned_reps(config, warm) : config.reps;
    times.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      FlopLedger rep_ledger;
      Matrix rep_result;
      times.push_back(detail::timed_run(fx, method, rep_result, rep_ledger));
      if (!config.warmup && r == 0) {
        result = std::move(rep_result);
        record.flops = rep_ledger.count();
      }
    }
    record.reps = reps;
    record.mean_time_s = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(reps);
    record.median_time_s = detail::median(times);
    record.error_frobenius = inverse_residual(fx.updated, result);
  } catch (const std::exception& e) {
    record.failure = e.what();
  }
  return record;
}

inline BenchRecord run_cell(const BenchConfig& config, const SizeSpec& size, std::size_t k,
                            UpdateMethod method) {
  const Matrix data = gen_dataset(config.S, size, config.seed, config.data_mode, config.distribution);
  BenchRecord record;
  try {
    const CellFixture fx = prepare_cell(data, k, config.ridge);
    return time_method(fx, method, config);
  } catch (const std::exception& e) {
    record.s = size.s;
    record.k = k;
    record.method = method;
    record.failure = e.what();
  }
  return record;
}

using Progress = std::function<void(const BenchRecord&)>;

inline std::vector<BenchRecord> run_size(const BenchConfig& config, const SizeSpec& size,
                                         const Progress& progress) {
  std::vector<BenchRecord> records;
  const Matrix data = gen_dataset(config.S, size, config.seed, config.data_mode, config.distribution);
  for (auto k : config.ks) {
    std::optional<CellFixture> fx;
    std::string failure;
    try {
      fx = prepare_cell(data, k, config.ridge);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    for (auto method : config.methods) {
      BenchRecord record;
      if (fx) {
        record = time_method(*fx, method, config);
      } else {
        record.s = size.s;
        record.k = k;
        record.method = method;
        record.failure = failure;
      }
      if (progress) progress(record);
      records.push_back(std::move(record));
    }
  }
  return records;
}

// All cells, sizes in config order. Without serial_timing, sizes are spread
// over worker threads.
inline std::vector<BenchRecord> run_bench(const BenchConfig& config, const Progress& progress = {}) {
  validate(config);
  std::vector<std::vector<BenchRecord>> per_size(config.sizes.size());
  if (config.serial_timing || config.sizes.size() == 1) {
    for (std::size_t i = 0; i < config.sizes.size(); ++i) {
      per_size[i] = run_size(config, config.sizes[i], progress);
    }
  } else {
    std::mutex progress_mutex;
    Progress locked = [&](const BenchRecord& r) {
      if (!progress) return;
      std::lock_guard lock(progress_mutex);
      progress(r);
    };
    const std::size_t workers =
        std::min<std::size_t>(config.sizes.size(), std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < config.sizes.size(); i += workers) {
          per_size[i] = run_size(config, config.sizes[i], locked);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  std::vector<BenchRecord> records;
  for (auto& block : per_size) {
    records.insert(records.end(), std::make_move_iterator(block.begin()),
                   std::make_move_iterator(block.end()));
  }
  return records;
}

struct GridResult {
  std::vector<BenchRecord> records;
  std::map<std::pair<std::size_t, std::size_t>, UpdateMethod> winners;
};

// Winner per (s, k): the successful method with the smallest median time.
inline std::map<std::pair<std::size_t, std::size_t>, UpdateMethod> winners_of(
    const std::vector<BenchRecord>& records) {
  std::map<std::pair<std::size_t, std::size_t>, std::pair<UpdateMethod, double>> best;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    const auto key = std::make_pair(r.s, r.k);
    auto it = best.find(key);
    if (it == best.end() || r.median_time_s < it->second.second) {
      best[key] = {r.method, r.median_time_s};
    }
  }
  std::map<std::pair<std::size_t, std::size_t>, UpdateMethod> out;
  for (const auto& [key, value] : best) out.emplace(key, value.first);
  return out;
}

inline GridResult fastest_grid(const BenchConfig& config, const Progress& progress = {}) {
  GridResult grid;
  grid.records = run_bench(config, progress);
  grid.winners = winners_of(grid.records);
  return grid;
}

}  // namespace rankup::bench
