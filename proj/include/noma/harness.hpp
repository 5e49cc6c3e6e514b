#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "noma/config.hpp"
#include "noma/serialization.hpp"

namespace noma {

enum class Algo { crl, tql, fm_max, opt };

Algo parse_algo(const std::string& name);
std::string algo_name(Algo algo);

struct ResultRecord {
  std::string algo;
  std::uint64_t seed = 0;
  // Mean delivered packets (over T frames) across the evaluated realizations.
  double delivered = 0.0;
  std::vector<int> per_realization;
  int first_realization = 0;
  double runtime_s = 0.0;
  // "ok"; for opt "optimal" or "unproven" (some solve hit its time limit).
  std::string status = "ok";
  // Conservation witnesses over everything the run executed.
  double max_energy_spent = 0.0;
  int max_frame_delivered = 0;
};

// Realizations an algorithm is scored on: the last eval_window of the
// learning horizon, [rounds - window, rounds). fm-max and opt use the CRL
// horizon so that all four are compared on the same draws.
std::pair<int, int> evaluation_range(Algo algo, const ExperimentConfig& config);

// Learning runs report one JSON object per round or episode.
using TraceSink = std::function<void(const Json&)>;

ResultRecord run(Algo algo, const ExperimentConfig& config, std::uint64_t seed,
                 const TraceSink& trace = {});

enum class SweepParam { max_kbits, group_cap };

SweepParam parse_sweep_param(const std::string& name);
std::string sweep_param_name(SweepParam param);

struct SweepSpec {
  SweepParam param = SweepParam::max_kbits;
  std::vector<int> values;
  int replications = 20;
  std::uint64_t base_seed = 1;  // replication r uses base_seed + r
  ExperimentConfig base;
  std::vector<Algo> algos{Algo::crl, Algo::tql, Algo::fm_max, Algo::opt};
  int workers = 0;  // 0: one per hardware thread

  void validate() const;
};

struct SweepRow {
  std::string param;
  int value = 0;
  std::string algo;
  std::uint64_t seed = 0;
  double delivered = 0.0;
  double runtime_s = 0.0;
  std::string status;
  double max_energy_spent = 0.0;
  int max_frame_delivered = 0;
};

ExperimentConfig apply_sweep_value(const ExperimentConfig& base, SweepParam param, int value);

// Rows come back ordered by (value, replication, algorithm) whatever the
// worker count. A failing run is recorded in its row's status.
std::vector<SweepRow> sweep(const SweepSpec& spec,
                            const std::function<void(const SweepRow&)>& progress = {});

// Columns: param,value,algo,seed,delivered,runtime,status.
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows, bool with_runtime = true);

struct SummaryCell {
  int value = 0;
  std::string algo;
  int n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double ci95 = 0.0;  // half-width, Student t
};

std::vector<SummaryCell> summarize(const std::vector<SweepRow>& rows);
Json summary_json(const SweepSpec& spec, const std::vector<SummaryCell>& cells);

// Half-width of the two-sided 95% Student t interval for the mean.
double ci95_half_width(double stddev, int n);

}  // namespace noma
