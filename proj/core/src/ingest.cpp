#include "roadmon/ingest.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "text_util.hpp"

namespace roadmon {

DeviceLogParser::DeviceLogParser(StreamMeta meta, bool lenient)
    : meta_(std::move(meta)), lenient_(lenient) {}

std::optional<SensorSample> DeviceLogParser::feed_line(std::string_view raw) {
  ++line_no_;
  std::string_view line = detail::strip_cr(raw);

  if (!header_seen_) {
    if (line != kCanonicalCsvHeader) {
      throw MalformedLine(line_no_, "expected header '" + std::string(kCanonicalCsvHeader) + "'");
    }
    header_seen_ = true;
    return std::nullopt;
  }

  if (line.empty()) return std::nullopt;  // ignore blank trailing lines
  ++stats_.rows_in;

  auto fail = [&](const std::string& why) -> std::optional<SensorSample> {
    if (lenient_) {
      ++stats_.skipped;
      return std::nullopt;
    }
    throw MalformedLine(line_no_, why);
  };

  std::vector<std::string_view> fields;
  detail::split_fields(line, ',', fields);
  if (fields.size() != 9) {
    return fail("expected 9 fields, got " + std::to_string(fields.size()));
  }

  double vals[8];
  for (int i = 0; i < 8; ++i) {
    auto v = detail::parse_double(fields[i]);
    if (!v || !std::isfinite(*v)) return fail("unparsable number in field " + std::to_string(i + 1));
    vals[i] = *v;
  }
  std::string_view fix = detail::strip_cr(fields[8]);
  if (fix != "0" && fix != "1") return fail("fix flag must be 0 or 1");

  SensorSample s;
  s.t_ms = vals[0];
  s.az = vals[3] * meta_.accel_scale;
  s.lat = vals[4];
  s.lon = vals[5];
  s.speed = vals[6];
  s.alt = vals[7];
  s.gps_fresh = (fix == "1");

  if (s.lat < -90.0 || s.lat > 90.0) return fail("latitude out of range");
  if (s.lon < -180.0 || s.lon > 180.0) return fail("longitude out of range");
  if (s.speed < 0.0) return fail("negative speed");
  if (have_last_t_ && s.t_ms < last_t_ms_) return fail("timestamp moved backward");

  last_t_ms_ = s.t_ms;
  have_last_t_ = true;
  if (s.gps_fresh) stats_.saw_fix = true;
  ++stats_.emitted;
  return s;
}

void DeviceLogParser::finish() const {
  if (!stats_.saw_fix) throw NoGpsFix();
}

std::vector<SensorSample> parse_device_log(std::istream& in, const StreamMeta& meta,
                                           bool lenient, ParseStats* stats) {
  DeviceLogParser parser(meta, lenient);
  std::vector<SensorSample> samples;
  std::string line;
  bool any_line = false;
  while (std::getline(in, line)) {
    any_line = true;
    if (auto s = parser.feed_line(line)) samples.push_back(*s);
  }
  if (!any_line) {
    if (stats) *stats = parser.stats();
    throw NoGpsFix();
  }
  parser.finish();
  if (stats) *stats = parser.stats();
  return samples;
}

void append_canonical_row(std::ostream& out, const SensorSample& s, const StreamMeta& meta) {
  out << detail::format_double(s.t_ms) << ",0,0,"
      << detail::format_double(s.az / meta.accel_scale) << ','
      << detail::format_double(s.lat) << ',' << detail::format_double(s.lon) << ','
      << detail::format_double(s.speed) << ',' << detail::format_double(s.alt) << ','
      << (s.gps_fresh ? '1' : '0') << '\n';
}

void write_canonical_csv(std::ostream& out, std::span<const SensorSample> samples,
                         const StreamMeta& meta) {
  out << kCanonicalCsvHeader << '\n';
  for (const auto& s : samples) append_canonical_row(out, s, meta);
}

}  // namespace roadmon
