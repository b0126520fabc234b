#pragma once

#include "biabd/slcore.hpp"

namespace biabd {

// Decision procedure for conjunctions of =, !=, <, <= over variables, null and
// integer constants. null is the integer 0. Complete over the integers.
bool satisfiable(const PureFormula& pi);

class PureContext {
 public:
  static PureContext build(const PureFormula& pi);

  bool consistent() const { return consistent_; }
  const PureFormula& atoms() const { return atoms_; }

  // Inconsistent contexts entail everything.
  bool entails_atom(const PureAtom& a) const;
  bool entails(const PureFormula& pi) const;
  PureContext with(const PureFormula& extra) const;

 private:
  PureFormula atoms_;
  bool consistent_ = true;
};

}  // namespace biabd
