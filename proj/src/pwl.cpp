#include "dlau/pwl.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>

#include "dlau/csv.hpp"
#include "dlau/error.hpp"
#include "dlau/sigmoid.hpp"

namespace dlau {

namespace {

constexpr std::array<double, 7> kValidWidths = {8.0, 4.0, 2.0, 1.0, 0.5, 0.25, 0.125};

std::size_t segment_index(const PwlTable& table, double magnitude) {
  const auto idx = static_cast<std::size_t>(std::floor(magnitude / table.k()));
  return std::min(idx, table.segments() - 1);
}

}  // namespace

bool is_valid_pwl_k(double k) {
  return std::find(kValidWidths.begin(), kValidWidths.end(), k) != kValidWidths.end();
}

PwlTable::PwlTable(double k, std::vector<double> slopes, std::vector<double> intercepts)
    : k_(k), slopes_(std::move(slopes)), intercepts_(std::move(intercepts)) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw InvalidArgument("pwl segment width must be positive, got " + std::to_string(k));
  }
  const double count = kPwlRange / k;
  if (count != std::floor(count) || count < 1.0) {
    throw InvalidArgument("pwl segment width " + std::to_string(k) + " does not divide 8");
  }
  const auto n = static_cast<std::size_t>(count);
  if (slopes_.size() != n || intercepts_.size() != n) {
    throw InvalidArgument("pwl tables need " + std::to_string(n) + " entries, got a=" +
                          std::to_string(slopes_.size()) +
                          " b=" + std::to_string(intercepts_.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(slopes_[i] > 0.0) || !std::isfinite(slopes_[i]) || !std::isfinite(intercepts_[i])) {
      throw InvalidArgument("pwl segment " + std::to_string(i) + " has a non-positive slope");
    }
  }
  if (intercepts_[0] != 0.5) {
    throw InvalidArgument("pwl intercept b[0] must be 0.5");
  }
}

PwlTable build_pwl_table(double k) {
  if (!is_valid_pwl_k(k)) {
    throw InvalidArgument("unsupported pwl segment width " + std::to_string(k) +
                          " (expected one of 8, 4, 2, 1, 0.5, 0.25, 0.125)");
  }
  const auto n = static_cast<std::size_t>(kPwlRange / k);
  std::vector<double> a(n);
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = static_cast<double>(i) * k;
    const double hi = static_cast<double>(i + 1) * k;
    a[i] = (sigmoid_exact(hi) - sigmoid_exact(lo)) / k;
    b[i] = sigmoid_exact(lo) - a[i] * lo;
  }
  return PwlTable(k, std::move(a), std::move(b));
}

double pwl_sigmoid(const PwlTable& table, double x) {
  if (x <= -kPwlRange) return 0.0;
  if (x >= kPwlRange) return 1.0;
  const auto a = table.slopes();
  const auto b = table.intercepts();
  if (x > 0.0) {
    // Segments are [i*k, (i+1)*k); x < 8 keeps i in range, the clamp guards rounding.
    const std::size_t i = segment_index(table, x);
    return a[i] * x + b[i];
  }
  // -8 < x <= 0, including x == 0.
  const std::size_t i = segment_index(table, -x);
  return 1.0 + a[i] * x - b[i];
}

PwlErrorScan pwl_max_error(const PwlTable& table, std::size_t samples) {
  if (samples < 1000) {
    throw InvalidArgument("pwl_max_error needs at least 1000 samples, got " +
                          std::to_string(samples));
  }
  PwlErrorScan scan;
  scan.argmax_x = -10.0;
  const double step = 20.0 / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = -10.0 + step * static_cast<double>(i);
    const double err = std::abs(pwl_sigmoid(table, x) - sigmoid_exact(x));
    if (err > scan.max_abs_err) {
      scan.max_abs_err = err;
      scan.argmax_x = x;
    }
  }
  return scan;
}

void write_pwl_csv(std::ostream& os, const PwlTable& table) {
  os << "segment_index,x_lo,x_hi,a,b\n";
  const auto a = table.slopes();
  const auto b = table.intercepts();
  for (std::size_t i = 0; i < table.segments(); ++i) {
    const double lo = static_cast<double>(i) * table.k();
    os << i << ',' << csv::num(lo) << ',' << csv::num(lo + table.k()) << ',' << csv::num(a[i])
       << ',' << csv::num(b[i]) << '\n';
  }
}

}  // namespace dlau
