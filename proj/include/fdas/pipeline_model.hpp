#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fdas/config.hpp"
#include "fdas/timing.hpp"

namespace fdas {

struct DeviceModel {
  double global_memory_bandwidth = 20e9;          // bytes/s
  double off_chip_capacity = 8.0 * (1ull << 30);  // bytes
  double host_link_bandwidth = 7.88e9;            // bytes/s, PCIe Gen3 x8
  double reconfig_time = 1.0;                     // seconds

  /// Throws std::invalid_argument naming the first non-positive field.
  void validate() const;
};

enum class Scheme { single_input, multi_input, multi_config };

std::string to_string(Scheme s);
/// single-input, multi-input, multi-config
Scheme parse_scheme(const std::string& name);

double total_latency(const StageTiming& st);
double max_stage(const StageTiming& st);

/// 3 iff the slowest stage is below half the total latency, else 2.
int choose_buffering(const StageTiming& st);

/// buffering 1: t_fdas; 2: max(m, t_fdas - m); 3: m, where m is the slowest stage.
double ideal_period(const StageTiming& st, int buffering);

/// Steady-state schedule of one pipeline period under a shared memory bus.
struct ContentionTrace {
  double period = 0.0;
  std::vector<double> ft_launch_span;  // wall time of each FT launch (overhead excluded)
  double fop_span = 0.0;
  double hm_span = 0.0;
};

/// Stages resident together run concurrently. Triple buffering overlaps all
/// three stages; double buffering overlaps the slowest stage with the other two
/// run back to back. While concurrent phases demand more than the bus provides
/// each slows by bandwidth / total demand; a phase whose demand alone fills the
/// bus takes it exclusively and holds every other bus user until it finishes.
/// Phases with zero demand are never slowed.
ContentionTrace contention_trace(const StageTiming& st, const DeviceModel& dev, int buffering);
double contended_period(const StageTiming& st, const DeviceModel& dev, int buffering);

/// Period with `n` devices. single-input splits harmonic summing n ways,
/// multi-input feeds each device its own array, multi-config gives each stage
/// its own device and pays a plane transfer over the host link per hand-off.
/// `seconds_per_unit` converts the transfer time into the timing's unit.
double multi_device_period(const StageTiming& st, std::size_t n, Scheme scheme, const DeviceModel& dev = {},
                           double seconds_per_unit = 1.0);

struct PipelinePlan {
  int buffering = 1;
  std::size_t n_devices = 1;
  Scheme scheme = Scheme::single_input;
  double period = 0.0;  // contended single-device period, capped at t_fdas
  double t_fdas = 0.0;
  double device_period = 0.0;  // with n_devices under `scheme`
  bool degraded = false;       // buffering lowered for lack of off-chip capacity
  bool reconfiguration_allowed = true;
  std::vector<std::string> notes;
};

PipelinePlan plan(const StageTiming& st, const DeviceModel& dev, std::size_t n_devices, Scheme scheme,
                  std::optional<double> t_limit = std::nullopt, double seconds_per_unit = 1.0);

/// Fills zero demands with (bytes read + bytes written) / stage time from the
/// plane sizes of `config`. Stage times are taken in `seconds_per_unit`.
void estimate_demands(StageTiming& st, const FdasConfig& config, double seconds_per_unit = 1.0);

struct ReportRow {
  std::string combination;
  double t_ft = 0.0;
  double t_fop = 0.0;
  double t_hm = 0.0;
  double t_fdas = 0.0;
  int buffering = 1;
  bool degraded = false;
  double period_ideal = 0.0;
  double period_contended = 0.0;
  double period_single_input = 0.0;
  double period_multi_input = 0.0;
  double period_multi_config = 0.0;
};

struct SweepReport {
  std::string unit = "s";
  std::size_t n_devices = 1;
  std::vector<ReportRow> rows;  // ranked by contended period, then name
};

/// Throws std::invalid_argument on an empty combination list.
SweepReport sweep(const TimingSet& timings, const DeviceModel& dev, std::size_t n_devices, std::size_t threads = 1);

std::string report_to_json(const SweepReport& report);
std::string report_to_csv(const SweepReport& report);

}  // namespace fdas
