#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "roadmon/geo.hpp"

namespace roadmon {

/// Exact-length DFT, A(k) = sum_n x(n) e^{-i 2 pi k n / N}. Power-of-two
/// lengths take an iterative radix-2 path, other composites a recursive
/// mixed-radix path, prime lengths a direct evaluation; all agree with the
/// brute-force definition to <= 1e-9 relative error. No zero padding.
std::vector<std::complex<double>> dft(std::span<const std::complex<double>> signal);
std::vector<std::complex<double>> dft(std::span<const double> signal);

/// Inverse transform such that inverse_dft(dft(x)) == x up to rounding.
std::vector<std::complex<double>> inverse_dft(std::span<const std::complex<double>> spectrum);

/// One-sided power spectrum, bins k = 0..floor(N/2).
struct Spectrum {
  std::vector<double> freqs;  // Hz, strictly increasing from 0
  std::vector<double> power;
};

/// Mean-subtracted one-sided power spectrum: P(k) = |A(k)|^2 / N with
/// interior bins doubled; freqs(k) = k fs / N. Satisfies Parseval against
/// sum (x - mean)^2.
Spectrum power_spectrum(std::span<const double> signal, double fs_hz);

/// The seven-value model input plus window geometry for the feature table.
struct SegmentFeatures {
  std::size_t index = 0;
  double auc = 0.0;         // sum of power bins k >= 1
  double mp = 0.0;          // mean power
  double sdp = 0.0;         // population standard deviation of power
  double mxp = 0.0;         // maximum power
  double df = 0.0;          // dominant frequency, Hz
  double mean_speed = 0.0;  // m/s
  double mean_alt = 0.0;    // m
  std::size_t n_samples = 0;
  double fs = 0.0;          // effective rate for this window, Hz
  // window geometry, carried through to the feature table
  double lat0 = 0.0, lon0 = 0.0, lat1 = 0.0, lon1 = 0.0;
  double length_mi = 0.0;
};

inline constexpr std::size_t kNumFeatures = 7;
inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "auc", "mp", "sdp", "mxp", "df", "mean_speed", "mean_alt"};

/// Model input vector in canonical feature order.
std::array<double, kNumFeatures> feature_vector(const SegmentFeatures& f);

/// Spectral + aggregate features for one window. The DC bin is excluded from
/// all power statistics (the series is mean-subtracted, so it is ~0 anyway).
/// Throws TooShort for windows under 2 samples or with no time extent.
SegmentFeatures extract_features(const SegmentWindow& window);

/// Feature table interchange format, header:
/// index,auc,mp,sdp,mxp,df,mean_speed,mean_alt,n_samples,fs,lat0,lon0,lat1,lon1,length_mi
void write_feature_csv(std::ostream& out, std::span<const SegmentFeatures> rows);
std::vector<SegmentFeatures> read_feature_csv(std::istream& in);

}  // namespace roadmon
