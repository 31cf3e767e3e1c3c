#include "roadmon/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <string>

#include "roadmon/errors.hpp"
#include "text_util.hpp"

namespace roadmon {

namespace {

using cd = std::complex<double>;

cd unit_root(std::size_t q, std::size_t n) {
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

std::size_t smallest_prime_factor(std::size_t n) {
  if (n % 2 == 0) return 2;
  for (std::size_t p = 3; p * p <= n; p += 2) {
    if (n % p == 0) return p;
  }
  return n;
}

// Direct O(N^2) evaluation with a precomputed root table; used for prime
// lengths where no decimation applies.
std::vector<cd> dft_direct(std::span<const cd> x) {
  const std::size_t n = x.size();
  std::vector<cd> roots(n);
  for (std::size_t q = 0; q < n; ++q) roots[q] = unit_root(q, n);
  std::vector<cd> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cd acc{0.0, 0.0};
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += x[i] * roots[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    out[k] = acc;
  }
  return out;
}

// Iterative radix-2 with bit-reversal permutation.
void dft_pow2_inplace(std::vector<cd>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    const cd wl{std::cos(angle), std::sin(angle)};
    for (std::size_t i = 0; i < n; i += len) {
      cd w{1.0, 0.0};
      for (std::size_t k = 0; k < len / 2; ++k) {
        cd u = a[i + k];
        cd v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

std::vector<cd> dft_rec(std::span<const cd> x) {
  const std::size_t n = x.size();
  if (n == 1) return {x[0]};
  if ((n & (n - 1)) == 0) {
    std::vector<cd> a(x.begin(), x.end());
    dft_pow2_inplace(a);
    return a;
  }
  const std::size_t r = smallest_prime_factor(n);
  if (r == n) return dft_direct(x);

  const std::size_t m = n / r;
  std::vector<std::vector<cd>> sub(r);
  std::vector<cd> gather(m);
  for (std::size_t j = 0; j < r; ++j) {
    for (std::size_t q = 0; q < m; ++q) gather[q] = x[j + q * r];
    sub[j] = dft_rec(gather);
  }
  std::vector<cd> roots(n);
  for (std::size_t q = 0; q < n; ++q) roots[q] = unit_root(q, n);
  std::vector<cd> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cd acc{0.0, 0.0};
    const std::size_t km = k % m;
    std::size_t tw = 0;
    for (std::size_t j = 0; j < r; ++j) {
      acc += roots[tw] * sub[j][km];
      tw += k;
      if (tw >= n) tw -= n;
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace

std::vector<cd> dft(std::span<const cd> signal) {
  if (signal.empty()) throw EmptySignal();
  return dft_rec(signal);
}

std::vector<cd> dft(std::span<const double> signal) {
  if (signal.empty()) throw EmptySignal();
  std::vector<cd> x(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) x[i] = cd{signal[i], 0.0};
  return dft_rec(x);
}

std::vector<cd> inverse_dft(std::span<const cd> spectrum) {
  if (spectrum.empty()) throw EmptySignal();
  std::vector<cd> conj(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) conj[i] = std::conj(spectrum[i]);
  std::vector<cd> y = dft_rec(conj);
  const double inv_n = 1.0 / static_cast<double>(spectrum.size());
  for (auto& v : y) v = std::conj(v) * inv_n;
  return y;
}

Spectrum power_spectrum(std::span<const double> signal, double fs_hz) {
  if (signal.size() < 2) throw EmptySignal();
  if (fs_hz <= 0.0) throw NonpositiveRate(fs_hz);

  const std::size_t n = signal.size();
  const double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(n);
  std::vector<cd> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = cd{signal[i] - mean, 0.0};
  const std::vector<cd> a = dft_rec(x);

  const std::size_t half = n / 2;
  Spectrum sp;
  sp.freqs.resize(half + 1);
  sp.power.resize(half + 1);
  const bool even = (n % 2 == 0);
  for (std::size_t k = 0; k <= half; ++k) {
    double p = std::norm(a[k]) / static_cast<double>(n);
    const bool interior = k != 0 && !(even && k == half);
    if (interior) p *= 2.0;
    sp.power[k] = p;
    sp.freqs[k] = static_cast<double>(k) * fs_hz / static_cast<double>(n);
  }
  return sp;
}

std::array<double, kNumFeatures> feature_vector(const SegmentFeatures& f) {
  return {f.auc, f.mp, f.sdp, f.mxp, f.df, f.mean_speed, f.mean_alt};
}

SegmentFeatures extract_features(const SegmentWindow& window) {
  const std::size_t n = window.az_series.size();
  if (n < 2) throw TooShort("window has fewer than 2 samples");
  const double span_s = (window.t_end_ms - window.t_start_ms) / 1000.0;
  if (span_s <= 0.0) throw TooShort("window has no time extent");
  if (window.speeds.empty() || window.alts.empty()) throw TooShort("window has no GPS readings");

  const double fs = static_cast<double>(n) / span_s;
  const Spectrum sp = power_spectrum(window.az_series, fs);

  // statistics over bins k >= 1
  const std::size_t bins = sp.power.size() - 1;
  double sum = 0.0, max_p = 0.0;
  std::size_t arg_max = 1;
  for (std::size_t k = 1; k < sp.power.size(); ++k) {
    sum += sp.power[k];
    if (sp.power[k] > max_p) {
      max_p = sp.power[k];
      arg_max = k;
    }
  }
  const double mean_p = sum / static_cast<double>(bins);
  double var = 0.0;
  for (std::size_t k = 1; k < sp.power.size(); ++k) {
    const double d = sp.power[k] - mean_p;
    var += d * d;
  }
  var /= static_cast<double>(bins);

  SegmentFeatures f;
  f.index = window.index;
  f.auc = sum;
  f.mp = mean_p;
  f.sdp = std::sqrt(var);
  f.mxp = max_p;
  f.df = sp.freqs[arg_max];
  f.mean_speed =
      std::accumulate(window.speeds.begin(), window.speeds.end(), 0.0) / window.speeds.size();
  f.mean_alt = std::accumulate(window.alts.begin(), window.alts.end(), 0.0) / window.alts.size();
  f.n_samples = n;
  f.fs = fs;
  f.lat0 = window.start_lat;
  f.lon0 = window.start_lon;
  f.lat1 = window.end_lat;
  f.lon1 = window.end_lon;
  f.length_mi = window.length_mi;
  return f;
}

namespace {
constexpr std::string_view kFeatureCsvHeader =
    "index,auc,mp,sdp,mxp,df,mean_speed,mean_alt,n_samples,fs,lat0,lon0,lat1,lon1,length_mi";
}

void write_feature_csv(std::ostream& out, std::span<const SegmentFeatures> rows) {
  out << kFeatureCsvHeader << '\n';
  for (const auto& f : rows) {
    out << f.index << ',' << detail::format_double(f.auc) << ',' << detail::format_double(f.mp)
        << ',' << detail::format_double(f.sdp) << ',' << detail::format_double(f.mxp) << ','
        << detail::format_double(f.df) << ',' << detail::format_double(f.mean_speed) << ','
        << detail::format_double(f.mean_alt) << ',' << f.n_samples << ','
        << detail::format_double(f.fs) << ',' << detail::format_double(f.lat0) << ','
        << detail::format_double(f.lon0) << ',' << detail::format_double(f.lat1) << ','
        << detail::format_double(f.lon1) << ',' << detail::format_double(f.length_mi) << '\n';
  }
}

std::vector<SegmentFeatures> read_feature_csv(std::istream& in) {
  std::vector<SegmentFeatures> rows;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> fields;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = detail::strip_cr(line);
    if (!header) {
      if (sv != kFeatureCsvHeader) throw MalformedLine(line_no, "bad feature table header");
      header = true;
      continue;
    }
    if (sv.empty()) continue;
    detail::split_fields(sv, ',', fields);
    if (fields.size() != 15) throw MalformedLine(line_no, "expected 15 fields");
    auto num = [&](std::size_t i) {
      auto v = detail::parse_double(fields[i]);
      if (!v) throw MalformedLine(line_no, "unparsable number in field " + std::to_string(i + 1));
      return *v;
    };
    SegmentFeatures f;
    auto idx = detail::parse_u64(fields[0]);
    if (!idx) throw MalformedLine(line_no, "bad index");
    f.index = static_cast<std::size_t>(*idx);
    f.auc = num(1);
    f.mp = num(2);
    f.sdp = num(3);
    f.mxp = num(4);
    f.df = num(5);
    f.mean_speed = num(6);
    f.mean_alt = num(7);
    auto ns = detail::parse_u64(fields[8]);
    if (!ns) throw MalformedLine(line_no, "bad n_samples");
    f.n_samples = static_cast<std::size_t>(*ns);
    f.fs = num(9);
    f.lat0 = num(10);
    f.lon0 = num(11);
    f.lat1 = num(12);
    f.lon1 = num(13);
    f.length_mi = num(14);
    rows.push_back(f);
  }
  if (!header) throw MalformedLine(0, "empty feature table");
  return rows;
}

}  // namespace roadmon
