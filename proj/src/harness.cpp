#include "noma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "noma/baselines.hpp"
#include "noma/crl.hpp"
#include "noma/opt.hpp"

namespace noma {

Algo parse_algo(const std::string& name) {
  if (name == "crl") return Algo::crl;
  if (name == "tql") return Algo::tql;
  if (name == "fm-max") return Algo::fm_max;
  if (name == "opt") return Algo::opt;
  throw std::invalid_argument("unknown algorithm '" + name + "' (crl, tql, fm-max, opt)");
}

std::string algo_name(Algo algo) {
  switch (algo) {
    case Algo::crl: return "crl";
    case Algo::tql: return "tql";
    case Algo::fm_max: return "fm-max";
    case Algo::opt: return "opt";
  }
  return "?";
}

std::pair<int, int> evaluation_range(Algo algo, const ExperimentConfig& config) {
  const int horizon = algo == Algo::tql ? config.tql.episodes : config.crl.rounds;
  return {std::max(0, horizon - config.eval_window), horizon};
}

namespace {

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

}  // namespace

ResultRecord run(Algo algo, const ExperimentConfig& config, std::uint64_t seed,
                 const TraceSink& trace) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const ScenarioStream stream(config.network, config.radio, config.traffic, seed);
  const auto [first, last] = evaluation_range(algo, config);

  ResultRecord rec;
  rec.algo = algo_name(algo);
  rec.seed = seed;
  rec.first_realization = first;

  switch (algo) {
    case Algo::crl: {
      const auto rounds = run_crl(stream, config.crl, seed, [&](int k, const RoundResult& r) {
        if (trace) trace(to_json(r, k, config.network));
      });
      for (const auto& r : rounds) {
        rec.max_energy_spent = std::max(rec.max_energy_spent, max_of(r.energy_spent));
        for (const auto& f : r.frames) {
          rec.max_frame_delivered = std::max(rec.max_frame_delivered, f.served_total);
        }
      }
      for (int k = first; k < last; ++k) rec.per_realization.push_back(rounds[k].delivered);
      break;
    }
    case Algo::tql: {
      const auto episodes = tql_train(stream, config.tql, seed);
      for (std::size_t k = 0; k < episodes.size(); ++k) {
        const auto& e = episodes[k];
        if (trace) {
          trace(Json{{"episode", k}, {"delivered", e.delivered}, {"reward", e.reward},
                     {"frame_delivered", e.frame_delivered}, {"energy_spent", e.energy_spent}});
        }
        rec.max_energy_spent = std::max(rec.max_energy_spent, max_of(e.energy_spent));
        for (int f : e.frame_delivered) rec.max_frame_delivered = std::max(rec.max_frame_delivered, f);
      }
      for (int k = first; k < last; ++k) rec.per_realization.push_back(episodes[k].delivered);
      break;
    }
    case Algo::fm_max: {
      for (int k = first; k < last; ++k) {
        const auto result = max_power_baseline(stream.realization(k));
        rec.max_energy_spent = std::max(rec.max_energy_spent, max_of(result.energy_spent));
        for (int f : result.frame_delivered) {
          rec.max_frame_delivered = std::max(rec.max_frame_delivered, f);
        }
        rec.per_realization.push_back(result.delivered);
      }
      break;
    }
    case Algo::opt: {
      rec.status = "optimal";
      for (int k = first; k < last; ++k) {
        const Scenario scenario = stream.realization(k);
        const auto sol = solve_offline(scenario, config.opt);
        if (!sol.proven_optimal) rec.status = "unproven";
        rec.max_energy_spent =
            std::max(rec.max_energy_spent, max_of(energy_spent(sol.assignment, config.network)));
        for (int t = 0; t < scenario.num_frames(); ++t) {
          rec.max_frame_delivered = std::max(
              rec.max_frame_delivered, count_delivered(sol.assignment[t], scenario, t).count);
        }
        if (trace) {
          trace(Json{{"realization", k}, {"objective", sol.objective},
                     {"proven_optimal", sol.proven_optimal}, {"nodes", sol.nodes}});
        }
        rec.per_realization.push_back(sol.objective);
      }
      break;
    }
  }

  double total = 0.0;
  for (int d : rec.per_realization) total += d;
  rec.delivered = rec.per_realization.empty() ? 0.0 : total / rec.per_realization.size();
  rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "max_kbits" || name == "lmax" || name == "L_max") return SweepParam::max_kbits;
  if (name == "group_cap" || name == "g" || name == "G") return SweepParam::group_cap;
  throw std::invalid_argument("unknown sweep parameter '" + name + "' (max_kbits, group_cap)");
}

std::string sweep_param_name(SweepParam param) {
  return param == SweepParam::max_kbits ? "max_kbits" : "group_cap";
}

void SweepSpec::validate() const {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (algos.empty()) throw std::invalid_argument("sweep needs at least one algorithm");
  for (int v : values) apply_sweep_value(base, param, v).validate();
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& base, SweepParam param, int value) {
  ExperimentConfig cfg = base;
  if (param == SweepParam::max_kbits) {
    cfg.traffic.max_kbits = value;
  } else {
    cfg.network.group_cap = value;
  }
  return cfg;
}

std::vector<SweepRow> sweep(const SweepSpec& spec,
                            const std::function<void(const SweepRow&)>& progress) {
  spec.validate();
  struct Job {
    int value;
    std::uint64_t seed;
    Algo algo;
  };
  std::vector<Job> jobs;
  for (int v : spec.values) {
    for (int r = 0; r < spec.replications; ++r) {
      for (Algo a : spec.algos) jobs.push_back({v, spec.base_seed + static_cast<std::uint64_t>(r), a});
    }
  }

  std::vector<SweepRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex report;
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      const auto& job = jobs[k];
      SweepRow row;
      row.param = sweep_param_name(spec.param);
      row.value = job.value;
      row.algo = algo_name(job.algo);
      row.seed = job.seed;
      try {
        const auto rec = run(job.algo, apply_sweep_value(spec.base, spec.param, job.value), job.seed);
        row.delivered = rec.delivered;
        row.runtime_s = rec.runtime_s;
        row.status = rec.status;
        row.max_energy_spent = rec.max_energy_spent;
        row.max_frame_delivered = rec.max_frame_delivered;
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
      rows[k] = row;
      if (progress) {
        std::lock_guard lock(report);
        progress(row);
      }
    }
  };

  int workers = spec.workers > 0 ? spec.workers
                                 : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min<int>(workers, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

namespace {

// Quotes a CSV field when it carries a separator or a quote.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows, bool with_runtime) {
  out << "param,value,algo,seed,delivered," << (with_runtime ? "runtime," : "") << "status\n";
  char buf[64];
  for (const auto& r : rows) {
    out << r.param << ',' << r.value << ',' << r.algo << ',' << r.seed << ',';
    std::snprintf(buf, sizeof buf, "%.4f", r.delivered);
    out << buf << ',';
    if (with_runtime) {
      std::snprintf(buf, sizeof buf, "%.3f", r.runtime_s);
      out << buf << ',';
    }
    out << csv_field(r.status) << '\n';
  }
}

double ci95_half_width(double stddev, int n) {
  if (n < 2) return 0.0;
  const boost::math::students_t dist(n - 1);
  return boost::math::quantile(boost::math::complement(dist, 0.025)) * stddev / std::sqrt(n);
}

std::vector<SummaryCell> summarize(const std::vector<SweepRow>& rows) {
  std::map<std::pair<int, std::string>, std::vector<double>> groups;
  std::vector<std::pair<int, std::string>> order;
  for (const auto& r : rows) {
    if (r.status.rfind("error", 0) == 0) continue;
    auto key = std::make_pair(r.value, r.algo);
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(r.delivered);
  }
  std::vector<SummaryCell> cells;
  for (const auto& key : order) {
    const auto& xs = groups[key];
    SummaryCell c;
    c.value = key.first;
    c.algo = key.second;
    c.n = static_cast<int>(xs.size());
    for (double x : xs) c.mean += x;
    c.mean /= c.n;
    if (c.n > 1) {
      double ss = 0.0;
      for (double x : xs) ss += (x - c.mean) * (x - c.mean);
      c.stddev = std::sqrt(ss / (c.n - 1));
    }
    c.ci95 = ci95_half_width(c.stddev, c.n);
    cells.push_back(c);
  }
  return cells;
}

Json summary_json(const SweepSpec& spec, const std::vector<SummaryCell>& cells) {
  Json out = {{"param", sweep_param_name(spec.param)},
              {"values", spec.values},
              {"replications", spec.replications},
              {"base_seed", spec.base_seed}};
  Json list = Json::array();
  for (const auto& c : cells) {
    list.push_back({{"value", c.value}, {"algo", c.algo}, {"n", c.n}, {"mean", c.mean},
                    {"stddev", c.stddev}, {"ci95", c.ci95}});
  }
  out["cells"] = std::move(list);
  return out;
}

}  // namespace noma
