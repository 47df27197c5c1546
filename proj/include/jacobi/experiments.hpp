#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "jacobi/params.hpp"
#include "jacobi/rng.hpp"
#include "jacobi/transport.hpp"

namespace jacobi {

enum class Mode { one_sample, bipartite, reference_proxy };
enum class Scaling { n, n_over_log_n };

std::string to_string(Mode mode);
std::string to_string(Scaling scaling);
Mode mode_from_string(const std::string& s);
Scaling scaling_from_string(const std::string& s);

/// Full description of a Monte Carlo run. Serializable to/from JSON with
/// field names matching the members; unknown keys are rejected.
struct ExperimentConfig {
  std::variant<JacobiParams, ProductJacobiParams> model{JacobiParams(0.5, 0.5)};
  Mode mode = Mode::one_sample;
  std::vector<std::size_t> n_grid;
  std::size_t replicas = 1;
  std::uint64_t base_seed = 0;
  Scaling scaling = Scaling::n;
  QuadratureSpec quad;
  std::string output_path;
  std::size_t ref_factor = 100;        // reference-proxy replication N/n
  bool arcsine_shortcut = false;
  bool record_wall_time = false;       // default keeps CSV bytes reproducible

  bool is_product() const { return std::holds_alternative<ProductJacobiParams>(model); }
  void validate() const;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct ExperimentRecord {
  std::size_t n = 0;
  std::size_t replica_index = 0;
  std::uint64_t seed = 0;
  double w2sq = 0.0;  // NaN when failed
  double wall_ms = 0.0;
  std::string status = "ok";
  bool ok() const { return status == "ok"; }
};

/// Seed for the (n, replica) cell: the replica-seed contract applied twice,
/// mix(mix(base ^ n * golden) ^ replica * golden).
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t n, std::uint64_t replica);

/// Runs replicas x |n_grid| cells, each on its own derived RngState.
/// Deterministic for a given config regardless of thread count (threads = 0
/// picks the machine parallelism). Per-replica failures are recorded in the
/// status field, never dropped.
std::vector<ExperimentRecord> run_replicas(const ExperimentConfig& config, unsigned threads = 0);

struct ConstantEstimate {
  std::size_t n = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  double scaled_mean = 0.0;
  double scaled_stderr = 0.0;
  std::size_t replicas = 0;
  std::size_t failures = 0;
};

/// Per-n mean and standard error of w2sq, raw and rescaled (by n or
/// n / log n). Requires >= 2 successful replicas per n.
std::vector<ConstantEstimate> estimate_constant(std::span<const ExperimentRecord> records,
                                                Scaling scaling);

struct RateFit {
  double a = 0.0;  // coefficient of log n / n
  double b = 0.0;  // coefficient of 1 / n
  double residual = 0.0;
  double stderr_a = 0.0;
};

/// Least squares of the per-n means against a log n / n + b / n.
/// Requires >= 3 grid points with >= 2 distinct n.
RateFit fit_log_rate(std::span<const ConstantEstimate> per_n);

/// CSV with the exact header
/// model,mode,alpha,beta,alpha2,beta2,n,replica,seed,w2sq,wall_ms,status.
void write_csv(std::ostream& out, const ExperimentConfig& config,
               std::span<const ExperimentRecord> records);

/// Aggregate JSON: per-n rows plus the rate fit when scaling is
/// n_over_log_n.
nlohmann::json aggregate_json(const ExperimentConfig& config,
                              std::span<const ExperimentRecord> records);

}  // namespace jacobi
