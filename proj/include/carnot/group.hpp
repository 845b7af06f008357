#pragma once

#include "carnot/algebra.hpp"
#include "carnot/frames.hpp"
#include "carnot/group_law.hpp"

#include <memory>

namespace carnot {

/// A validated algebra together with its group law and left-invariant frame.
/// Immutable; share it through `GroupPtr`.
class Group {
 public:
  explicit Group(const GradedAlgebraSpec& spec) : law_(bch_group_law(validate_algebra(spec))), frame_(law_) {}
  explicit Group(const ValidatedAlgebra& algebra) : law_(bch_group_law(algebra)), frame_(law_) {}

  const GroupLaw& law() const { return law_; }
  const Frame& frame() const { return frame_; }
  const ValidatedAlgebra& algebra() const { return law_.algebra(); }
  int dimension() const { return law_.dimension(); }
  int step() const { return algebra().step(); }
  const std::vector<int>& degrees() const { return law_.degrees(); }
  int degree(int j) const { return algebra().degree(j); }
  const std::string& name() const { return algebra().name(); }

 private:
  GroupLaw law_;
  Frame frame_;
};

using GroupPtr = std::shared_ptr<const Group>;

inline GroupPtr make_group(const GradedAlgebraSpec& spec) { return std::make_shared<const Group>(spec); }
inline GroupPtr make_group(const std::string& name) { return make_group(algebras::by_name(name)); }

}  // namespace carnot
