#pragma once

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "rtpmend/channel.hpp"
#include "rtpmend/receiver.hpp"

namespace rtpmend {

// One sender -> destroyer -> receiver reproduction run, swept over bit
// error rates and repeated with fresh stream randomization each time.
struct ExperimentConfig {
  unsigned num_streams = 4;
  std::uint32_t packets_per_stream = 2000;
  std::uint32_t clean_prefix = 2;  // uncorrupted packets per stream, sent
                                   // first so the learner has a rate
  std::vector<double> ber_values;
  unsigned repetitions = 5;
  std::optional<std::size_t> cutoff;  // nullopt: best match always taken
  std::uint64_t master_seed = 42;
  std::size_t payload_size = 160;
  std::uint32_t ts_increment = 160;
  std::uint8_t payload_type = 0;

  void validate() const {
    if (num_streams == 0) {
      throw std::invalid_argument("config: num_streams must be positive");
    }
    if (packets_per_stream == 0) {
      throw std::invalid_argument(
          "config: packets_per_stream must be positive");
    }
    if (repetitions == 0) {
      throw std::invalid_argument("config: repetitions must be positive");
    }
    if (clean_prefix < 2) {
      // The sampling rate needs two correct packets to be learnable
      // before corruption starts.
      throw std::invalid_argument("config: clean_prefix must be >= 2");
    }
    for (double ber : ber_values) {
      if (ber < 0.0 || ber > 1.0) {
        throw std::invalid_argument("config: ber values must be in [0, 1]");
      }
    }
  }
};

// Raw counters of one (ber, repetition) cell. Every sent packet lands in
// exactly one of the four outcome buckets.
struct CellMetrics {
  double ber = 0.0;
  unsigned repetition = 0;
  unsigned num_streams = 0;
  std::optional<std::size_t> cutoff;

  std::uint64_t total_sent = 0;
  std::uint64_t clean_delivered = 0;    // has_errors == false
  std::uint64_t delivered_correct = 0;  // corrupted, assigned to its stream
  std::uint64_t misattributed = 0;      // corrupted, assigned elsewhere
  std::uint64_t dropped = 0;
  std::uint64_t field_error_packets = 0;  // delivered, header != sent header

  std::uint64_t delivered_total() const {
    return clean_delivered + delivered_correct + misattributed;
  }
  double misattribution_rate() const {
    return total_sent ? static_cast<double>(misattributed) / total_sent : 0.0;
  }
  double drop_rate() const {
    return total_sent ? static_cast<double>(dropped) / total_sent : 0.0;
  }
  double field_error_rate() const {
    const std::uint64_t delivered = delivered_total();
    return delivered ? static_cast<double>(field_error_packets) / delivered
                     : 0.0;
  }
  bool conserved() const {
    return clean_delivered + delivered_correct + misattributed + dropped ==
               total_sent &&
           field_error_packets <= delivered_correct + misattributed;
  }
};

/// Randomize per-stream sender parameters the way RTP implementations do
/// on stream creation. SSRCs are regenerated until distinct; everything
/// else is drawn once.
template <typename Urbg>
std::vector<StreamParams> make_stream_params(Urbg& rng, unsigned num_streams,
                                             std::uint8_t payload_type,
                                             std::uint32_t ts_increment) {
  std::vector<StreamParams> params;
  params.reserve(num_streams);
  for (unsigned i = 0; i < num_streams; ++i) {
    StreamParams p;
    p.payload_type = payload_type;
    p.ts_increment = ts_increment;
    for (;;) {
      p.ssrc = static_cast<std::uint32_t>(rng());
      bool taken = false;
      for (const StreamParams& existing : params) {
        if (existing.ssrc == p.ssrc) {
          taken = true;
          break;
        }
      }
      if (!taken) break;
    }
    p.initial_seq = static_cast<std::uint16_t>(rng());
    p.initial_ts = static_cast<std::uint32_t>(rng());
    params.push_back(p);
  }
  return params;
}

/// Run one cell: fresh streams, fresh RNG, one receiver. Packets go out in
/// strict round-robin across streams (the order that maximizes chances for
/// inter-stream confusion); the first clean_prefix rounds bypass the
/// destroyer entirely.
inline CellMetrics run_cell(const ExperimentConfig& config, double ber,
                            unsigned repetition) {
  config.validate();
  if (ber < 0.0 || ber > 1.0) {
    throw std::invalid_argument("run_cell: ber must be in [0, 1]");
  }

  const std::uint64_t cell_seed =
      mix_seed(config.master_seed, std::bit_cast<std::uint64_t>(ber),
               repetition, config.num_streams);
  std::mt19937_64 param_rng(mix_seed(cell_seed, 1));
  Corruptor destroyer(ChannelConfig{ber, mix_seed(cell_seed, 2)});

  const std::vector<StreamParams> streams = make_stream_params(
      param_rng, config.num_streams, config.payload_type, config.ts_increment);

  Receiver receiver;
  CellMetrics metrics;
  metrics.ber = ber;
  metrics.repetition = repetition;
  metrics.num_streams = config.num_streams;
  metrics.cutoff = config.cutoff;

  for (std::uint32_t index = 0; index < config.packets_per_stream; ++index) {
    for (const StreamParams& stream : streams) {
      SentPacket sent = make_packet(stream, index, config.payload_size);
      ++metrics.total_sent;

      IncomingPacket incoming;
      if (index < config.clean_prefix) {
        incoming.octets = std::move(sent.octets);
        incoming.has_errors = false;
      } else {
        CorruptResult corrupted = destroyer.corrupt(std::move(sent.octets));
        incoming.octets = std::move(corrupted.octets);
        incoming.has_errors = corrupted.flipped_bits > 0;
      }

      const DeliveryResult result = receiver.receive(incoming, config.cutoff);
      if (!result.is_delivered()) {
        ++metrics.dropped;
        continue;
      }
      const auto& delivered = result.delivered();
      if (!incoming.has_errors) {
        ++metrics.clean_delivered;
      } else if (delivered.ssrc == sent.ground_truth_ssrc) {
        ++metrics.delivered_correct;
      } else {
        ++metrics.misattributed;
      }
      if (serialize(delivered.header) !=
          serialize(sent.ground_truth_header)) {
        ++metrics.field_error_packets;
      }
    }
  }
  return metrics;
}

/// Run every (ber, repetition) cell of the sweep. Cells are independent
/// and run on `threads` workers (0: one per hardware thread); results come
/// back ordered by ber then repetition no matter how cells were scheduled,
/// so output is bit-identical for a given master seed.
inline std::vector<CellMetrics> run_sweep(const ExperimentConfig& config,
                                          unsigned threads = 0) {
  config.validate();

  struct Job {
    double ber;
    unsigned repetition;
  };
  std::vector<Job> jobs;
  jobs.reserve(config.ber_values.size() * config.repetitions);
  for (double ber : config.ber_values) {
    for (unsigned rep = 0; rep < config.repetitions; ++rep) {
      jobs.push_back({ber, rep});
    }
  }

  std::vector<CellMetrics> results(jobs.size());
  if (jobs.empty()) return results;

  unsigned worker_count = threads ? threads : std::thread::hardware_concurrency();
  if (worker_count == 0) worker_count = 1;
  if (worker_count > jobs.size()) {
    worker_count = static_cast<unsigned>(jobs.size());
  }

  if (worker_count == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      results[i] = run_cell(config, jobs[i].ber, jobs[i].repetition);
    }
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        results[i] = run_cell(config, jobs[i].ber, jobs[i].repetition);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(worker_count);
  for (unsigned i = 0; i < worker_count; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

// Mean plus two-sided 95% confidence half-width; the half-width is absent
// when only one repetition was run.
struct RateSummary {
  double mean = 0.0;
  std::optional<double> ci95;
};

// Per-ber aggregate over repetitions: summed counts and t-interval
// statistics of each rate.
struct BerAggregate {
  double ber = 0.0;
  unsigned num_streams = 0;
  std::optional<std::size_t> cutoff;
  unsigned repetitions = 0;

  std::uint64_t total_sent = 0;
  std::uint64_t clean_delivered = 0;
  std::uint64_t delivered_correct = 0;
  std::uint64_t misattributed = 0;
  std::uint64_t dropped = 0;
  std::uint64_t field_error_packets = 0;

  RateSummary misattribution;
  RateSummary drop;
  RateSummary field_error;
};

namespace detail {

inline RateSummary summarize_rates(const std::vector<double>& samples) {
  RateSummary summary;
  const std::size_t n = samples.size();
  double sum = 0.0;
  for (double x : samples) sum += x;
  summary.mean = n ? sum / static_cast<double>(n) : 0.0;
  if (n >= 2) {
    double ss = 0.0;
    for (double x : samples) {
      const double d = x - summary.mean;
      ss += d * d;
    }
    const double stddev = std::sqrt(ss / static_cast<double>(n - 1));
    const boost::math::students_t_distribution<double> dist(
        static_cast<double>(n - 1));
    const double t = boost::math::quantile(dist, 0.975);
    summary.ci95 = t * stddev / std::sqrt(static_cast<double>(n));
  }
  return summary;
}

}  // namespace detail

/// Collapse repetitions into one row per (ber, streams, cutoff): summed
/// counts, mean of each per-cell rate, and mean +/- t(0.975, n-1) * s/sqrt(n)
/// as the 95% confidence half-width.
inline std::vector<BerAggregate> summarize(std::span<const CellMetrics> cells) {
  struct Group {
    BerAggregate agg;
    std::vector<double> misattribution_rates;
    std::vector<double> drop_rates;
    std::vector<double> field_error_rates;
  };
  std::vector<Group> groups;
  for (const CellMetrics& cell : cells) {
    Group* group = nullptr;
    for (Group& g : groups) {
      if (g.agg.ber == cell.ber && g.agg.num_streams == cell.num_streams &&
          g.agg.cutoff == cell.cutoff) {
        group = &g;
        break;
      }
    }
    if (group == nullptr) {
      groups.emplace_back();
      group = &groups.back();
      group->agg.ber = cell.ber;
      group->agg.num_streams = cell.num_streams;
      group->agg.cutoff = cell.cutoff;
    }
    BerAggregate& agg = group->agg;
    ++agg.repetitions;
    agg.total_sent += cell.total_sent;
    agg.clean_delivered += cell.clean_delivered;
    agg.delivered_correct += cell.delivered_correct;
    agg.misattributed += cell.misattributed;
    agg.dropped += cell.dropped;
    agg.field_error_packets += cell.field_error_packets;
    group->misattribution_rates.push_back(cell.misattribution_rate());
    group->drop_rates.push_back(cell.drop_rate());
    group->field_error_rates.push_back(cell.field_error_rate());
  }

  std::vector<BerAggregate> out;
  out.reserve(groups.size());
  for (Group& g : groups) {
    g.agg.misattribution = detail::summarize_rates(g.misattribution_rates);
    g.agg.drop = detail::summarize_rates(g.drop_rates);
    g.agg.field_error = detail::summarize_rates(g.field_error_rates);
    out.push_back(g.agg);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV output and CLI-facing parsing helpers.

namespace detail {

inline std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

}  // namespace detail

inline std::string cutoff_label(std::optional<std::size_t> cutoff) {
  return cutoff ? std::to_string(*cutoff) : "none";
}

inline void write_cells_csv(std::ostream& os,
                            std::span<const CellMetrics> cells) {
  os << "ber,repetition,streams,cutoff,total_sent,clean_delivered,"
        "delivered_correct,misattributed,dropped,field_error_packets,"
        "misattribution_rate,drop_rate,field_error_rate\n";
  for (const CellMetrics& c : cells) {
    os << detail::format_double(c.ber) << ',' << c.repetition << ','
       << c.num_streams << ',' << cutoff_label(c.cutoff) << ','
       << c.total_sent << ',' << c.clean_delivered << ','
       << c.delivered_correct << ',' << c.misattributed << ',' << c.dropped
       << ',' << c.field_error_packets << ','
       << detail::format_double(c.misattribution_rate()) << ','
       << detail::format_double(c.drop_rate()) << ','
       << detail::format_double(c.field_error_rate()) << '\n';
  }
}

inline void write_summary_csv(std::ostream& os,
                              std::span<const BerAggregate> aggregates) {
  os << "ber,repetitions,streams,cutoff,total_sent,clean_delivered,"
        "delivered_correct,misattributed,dropped,field_error_packets,"
        "misattribution_rate_mean,misattribution_rate_ci95,"
        "drop_rate_mean,drop_rate_ci95,"
        "field_error_rate_mean,field_error_rate_ci95\n";
  auto ci_field = [](const RateSummary& s) {
    return s.ci95 ? detail::format_double(*s.ci95) : std::string();
  };
  for (const BerAggregate& a : aggregates) {
    os << detail::format_double(a.ber) << ',' << a.repetitions << ','
       << a.num_streams << ',' << cutoff_label(a.cutoff) << ','
       << a.total_sent << ',' << a.clean_delivered << ','
       << a.delivered_correct << ',' << a.misattributed << ',' << a.dropped
       << ',' << a.field_error_packets << ','
       << detail::format_double(a.misattribution.mean) << ','
       << ci_field(a.misattribution) << ','
       << detail::format_double(a.drop.mean) << ',' << ci_field(a.drop)
       << ',' << detail::format_double(a.field_error.mean) << ','
       << ci_field(a.field_error) << '\n';
  }
}

/// Parse a BER sweep specification: either "start:stop:step" (inclusive
/// of both endpoints, within floating-point slack) or a comma-separated
/// list of values.
inline std::vector<double> parse_ber_spec(const std::string& spec) {
  auto parse_one = [](const std::string& text) {
    std::size_t consumed = 0;
    double value = 0.0;
    try {
      value = std::stod(text, &consumed);
    } catch (const std::exception&) {
      throw std::invalid_argument("ber: not a number: '" + text + "'");
    }
    if (consumed != text.size()) {
      throw std::invalid_argument("ber: trailing junk in '" + text + "'");
    }
    if (value < 0.0 || value > 1.0) {
      throw std::invalid_argument("ber: value out of [0, 1]: '" + text + "'");
    }
    return value;
  };

  std::vector<double> values;
  if (spec.find(':') != std::string::npos) {
    std::istringstream in(spec);
    std::string start_text, stop_text, step_text;
    if (!std::getline(in, start_text, ':') ||
        !std::getline(in, stop_text, ':') || !std::getline(in, step_text) ||
        in.peek() != std::istringstream::traits_type::eof()) {
      throw std::invalid_argument("ber: expected start:stop:step");
    }
    const double start = parse_one(start_text);
    const double stop = parse_one(stop_text);
    double step = 0.0;
    try {
      step = std::stod(step_text);
    } catch (const std::exception&) {
      throw std::invalid_argument("ber: bad step '" + step_text + "'");
    }
    if (step <= 0.0) throw std::invalid_argument("ber: step must be > 0");
    if (stop < start) throw std::invalid_argument("ber: stop < start");
    for (int i = 0;; ++i) {
      const double value = start + i * step;
      if (value > stop + step * 1e-9) break;
      values.push_back(value);
    }
  } else {
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
      values.push_back(parse_one(item));
    }
    if (values.empty()) throw std::invalid_argument("ber: empty list");
  }
  return values;
}

}  // namespace rtpmend
