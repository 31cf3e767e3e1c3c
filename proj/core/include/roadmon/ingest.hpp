#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roadmon/errors.hpp"

namespace roadmon {

/// One timestamped row of vertical acceleration plus GPS state.
///
/// Rows between GPS fixes repeat the last fix (sample-and-hold) with
/// gps_fresh = false; only fresh rows advance distance downstream. Rows
/// logged before the first fix carry the 0/0 sentinel position.
struct SensorSample {
  double t_ms = 0.0;     // milliseconds since stream start, non-decreasing
  double az = 0.0;       // vertical acceleration, m/s^2, gravity included
  double lat = 0.0;      // decimal degrees
  double lon = 0.0;      // decimal degrees
  double speed = 0.0;    // ground speed, m/s
  double alt = 0.0;      // altitude, m
  bool gps_fresh = false;

  bool operator==(const SensorSample&) const = default;
};

struct StreamMeta {
  double sample_rate_hz = 365.0;  // nominal accelerometer rate
  double accel_scale = 1.0;       // raw counts -> m/s^2
  std::string source_id;
};

struct ParseStats {
  std::size_t rows_in = 0;   // data rows seen (header excluded)
  std::size_t emitted = 0;
  std::size_t skipped = 0;   // malformed rows dropped in lenient mode
  bool saw_fix = false;
};

inline constexpr std::string_view kCanonicalCsvHeader =
    "t_ms,ax,ay,az,lat,lon,speed_mps,alt_m,fix";

/// Incremental parser for the device log / canonical CSV format:
///   t_ms,ax,ay,az,lat,lon,speed_mps,alt_m,fix
/// Header row is mandatory. ax/ay are validated and dropped; az is scaled by
/// meta.accel_scale. Strict mode throws MalformedLine on any bad row; lenient
/// mode skips bad rows and counts them.
class DeviceLogParser {
 public:
  explicit DeviceLogParser(StreamMeta meta, bool lenient = false);

  /// Feed one line (no trailing newline). Returns a sample for data rows,
  /// nullopt for the header line or a skipped row.
  std::optional<SensorSample> feed_line(std::string_view line);

  /// Call at end of stream. Throws NoGpsFix if no row carried a fix.
  void finish() const;

  const ParseStats& stats() const { return stats_; }

 private:
  StreamMeta meta_;
  bool lenient_;
  bool header_seen_ = false;
  std::size_t line_no_ = 0;
  double last_t_ms_ = 0.0;
  bool have_last_t_ = false;
  ParseStats stats_;
};

/// Batch wrapper over DeviceLogParser. Throws NoGpsFix if the stream has no
/// valid fix (including on empty input).
std::vector<SensorSample> parse_device_log(std::istream& in, const StreamMeta& meta,
                                           bool lenient = false,
                                           ParseStats* stats = nullptr);

/// Writes the canonical CSV such that parse(write(S)) == S field-wise within
/// 1e-9. az is emitted in raw units (divided by meta.accel_scale); ax/ay are
/// written as 0.
void write_canonical_csv(std::ostream& out, std::span<const SensorSample> samples,
                         const StreamMeta& meta);

/// One data row of the canonical CSV (no header), for incremental writers.
void append_canonical_row(std::ostream& out, const SensorSample& sample,
                          const StreamMeta& meta);

}  // namespace roadmon
