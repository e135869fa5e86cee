#pragma once

#include <string>

#include "lmkit/expr.hpp"

namespace lmkit {

// Parses formula text into a ModelSpec.
//
//   model   := sum "~" ["-"] sum
//   sum     := prod (("+" | "-") prod)*
//   prod    := pow (("*" | "/") pow | juxtaposed "(" ...)*
//   pow     := atom [("^" | "**") INT]
//   atom    := NUMBER | NAME | QUOTED | TYPED | TRANS "(" sum ")"
//            | "Poly" "(" sum "," INT ")" | "(" sum ")"
//   TYPED   := ("Q" | "C") "(" name ["," "baseline" "=" name] ")"
//   TRANS   := Log | Log10 | Sin | Cos | Exp | Std | Standardize
//            | Cen | Center | Identity
//
// Names may be double-quoted to include spaces ("" escapes a quote).
// The intercept is the explicit constant 1; a formula without it has no
// intercept. "- E(x)" directly after x folds into the centered factor
// (x-E(x)), which is how centered terms print. Numeric constants fold:
// multiplying or dividing by a constant is absorbed (fits are
// scale-equivariant per column), additive constants other than 1 and
// division by a variable are rejected.
ModelSpec parse_formula(const std::string& text);

}  // namespace lmkit
