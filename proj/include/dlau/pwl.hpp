#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace dlau {

/// Slope/intercept tables of the piecewise-linear sigmoid.
///
/// Segment i covers [i*k, (i+1)*k) on the positive half of [0, 8]. Negative
/// inputs reuse the same tables through f(x) = 1 + a*x - b, i.e. 1 - f(-x).
/// Tables are immutable once constructed.
class PwlTable {
 public:
  /// Validates the invariants: 8/k integral, matching lengths, positive
  /// slopes and b[0] == 0.5.
  PwlTable(double k, std::vector<double> slopes, std::vector<double> intercepts);

  double k() const { return k_; }
  std::size_t segments() const { return slopes_.size(); }
  std::span<const double> slopes() const { return slopes_; }
  std::span<const double> intercepts() const { return intercepts_; }

 private:
  double k_;
  std::vector<double> slopes_;
  std::vector<double> intercepts_;
};

/// Saturation bound of the approximation; |x| beyond it maps to 0 or 1.
inline constexpr double kPwlRange = 8.0;
inline constexpr double kDefaultPwlK = 0.5;

/// True for the supported segment widths {8, 4, 2, 1, 0.5, 0.25, 0.125}.
bool is_valid_pwl_k(double k);

/// Chord interpolation of the exact sigmoid at the segment endpoints.
PwlTable build_pwl_table(double k);

/// Four-branch evaluation: 0 for x <= -8, 1 for x >= 8, mirrored chords in
/// between. x == 8 saturates so that f(x) + f(-x) == 1 holds at the edge
/// too; the jump of 1 - sigma(8) then sits just left of 8.
double pwl_sigmoid(const PwlTable& table, double x);

struct PwlErrorScan {
  double max_abs_err = 0.0;
  double argmax_x = 0.0;
};

/// Dense uniform scan of [-10, 10] with `samples` points (>= 1000), both
/// endpoints included.
PwlErrorScan pwl_max_error(const PwlTable& table, std::size_t samples);

/// CSV with header segment_index,x_lo,x_hi,a,b.
void write_pwl_csv(std::ostream& os, const PwlTable& table);

}  // namespace dlau
