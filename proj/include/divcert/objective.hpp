#pragma once

#include <memory>
#include <optional>
#include <string>

#include "divcert/dualset.hpp"
#include "divcert/linalg.hpp"

namespace divcert {

/// Smooth convex objective with an analytic gradient. Instances are immutable
/// and may be shared between threads.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dim() const = 0;
  /// Lipschitz constant of the gradient.
  virtual double smoothness() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;

  virtual std::pair<double, Vector> value_and_gradient(const Vector& x) const {
    return {value(x), gradient(x)};
  }

  /// M with f*(p) <= M on the whole dual set, when known.
  virtual std::optional<double> conjugate_bound() const { return std::nullopt; }
  virtual std::optional<DualSetDescription> dual_set() const { return std::nullopt; }
  /// f*(p) in closed form, when the family has one. Returns nullopt both for
  /// families without a formula and for p outside the domain.
  virtual std::optional<double> conjugate(const Vector& /*p*/) const { return std::nullopt; }

  /// f(x) - <p, x>. Families whose values blow up along the iterates override
  /// this to avoid cancellation.
  virtual double shifted_value(const Vector& x, const Vector& p) const { return value(x) - dot(p, x); }

  virtual std::string name() const = 0;

  void check_dim(const Vector& x) const {
    if (x.size() != dim()) {
      throw DimensionMismatch("point has dimension " + std::to_string(x.size()) + ", objective expects " +
                              std::to_string(dim()));
    }
  }
};

using ObjectivePtr = std::shared_ptr<const Objective>;

}  // namespace divcert
