#pragma once

#include <optional>

#include "dlau/pwl.hpp"
#include "dlau/sigmoid.hpp"

namespace dlau {

/// The nonlinearity applied after the final tile of each output.
class Activation {
 public:
  enum class Kind { ExactSigmoid, PwlSigmoid, Linear };

  static Activation exact() { return Activation(Kind::ExactSigmoid, std::nullopt); }
  static Activation pwl(PwlTable table) { return Activation(Kind::PwlSigmoid, std::move(table)); }
  /// Identity; only useful for testing the accumulation path in isolation.
  static Activation linear() { return Activation(Kind::Linear, std::nullopt); }

  Kind kind() const { return kind_; }
  const PwlTable* table() const { return table_ ? &*table_ : nullptr; }

  double operator()(double x) const {
    switch (kind_) {
      case Kind::ExactSigmoid: return sigmoid_exact(x);
      case Kind::PwlSigmoid: return pwl_sigmoid(*table_, x);
      case Kind::Linear: break;
    }
    return x;
  }

 private:
  Activation(Kind kind, std::optional<PwlTable> table) : kind_(kind), table_(std::move(table)) {}

  Kind kind_;
  std::optional<PwlTable> table_;
};

}  // namespace dlau
