#pragma once

#include <compare>
#include <numbers>

namespace lf {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kPlanck = 6.62607015e-34;           // J s
inline constexpr double kHbar = kPlanck / kTwoPi;            // J s
inline constexpr double kElementaryCharge = 1.602176634e-19; // C
inline constexpr double kBoltzmann = 1.380649e-23;          // J / K
// Reduced flux quantum hbar / 2e.
inline constexpr double kPhi0 = kHbar / (2.0 * kElementaryCharge);

/// A frequency that remembers its unit convention. User-facing values are
/// ordinary frequencies (Hz); Hamiltonians and rates are built from
/// angular() exactly once.
class Frequency {
 public:
  constexpr Frequency() = default;

  static constexpr Frequency from_hz(double hz) { return Frequency(hz); }
  static constexpr Frequency from_khz(double khz) { return Frequency(khz * 1e3); }
  static constexpr Frequency from_mhz(double mhz) { return Frequency(mhz * 1e6); }
  static constexpr Frequency from_ghz(double ghz) { return Frequency(ghz * 1e9); }
  static constexpr Frequency from_angular(double rad_per_s) {
    return Frequency(rad_per_s / kTwoPi);
  }

  constexpr double hz() const { return hz_; }
  constexpr double mhz() const { return hz_ * 1e-6; }
  constexpr double ghz() const { return hz_ * 1e-9; }
  constexpr double angular() const { return kTwoPi * hz_; }
  /// Energy h*f in joules.
  constexpr double joules() const { return kPlanck * hz_; }

  constexpr Frequency operator-() const { return Frequency(-hz_); }
  constexpr Frequency operator+(Frequency o) const { return Frequency(hz_ + o.hz_); }
  constexpr Frequency operator-(Frequency o) const { return Frequency(hz_ - o.hz_); }
  constexpr Frequency operator*(double s) const { return Frequency(hz_ * s); }
  constexpr Frequency operator/(double s) const { return Frequency(hz_ / s); }
  constexpr double operator/(Frequency o) const { return hz_ / o.hz_; }
  constexpr auto operator<=>(const Frequency&) const = default;

 private:
  constexpr explicit Frequency(double hz) : hz_(hz) {}
  double hz_ = 0.0;
};

constexpr Frequency operator*(double s, Frequency f) { return f * s; }

namespace literals {
constexpr Frequency operator""_hz(long double v) { return Frequency::from_hz(static_cast<double>(v)); }
constexpr Frequency operator""_khz(long double v) { return Frequency::from_khz(static_cast<double>(v)); }
constexpr Frequency operator""_mhz(long double v) { return Frequency::from_mhz(static_cast<double>(v)); }
constexpr Frequency operator""_ghz(long double v) { return Frequency::from_ghz(static_cast<double>(v)); }
}  // namespace literals

}  // namespace lf
