#pragma once

#include <iosfwd>
#include <string>

#include "aebo/optimizer.hpp"

namespace aebo {

/// Columns: iteration, x_1..x_d, y, feasible, best, tau, box_lo_1..box_lo_d,
/// box_hi_1..box_hi_d, fallback. Reals use 17 significant digits; NaN is written "nan".
std::string history_header(int dim);
void write_history(std::ostream& out, const RunRecord& record);

/// Parses a history written by write_history. The dimension comes from the header; the
/// best point is the first feasible row whose output equals the final best value.
RunRecord read_history(std::istream& in);

/// 17 significant digits, or "nan".
std::string format_real(double v);

}  // namespace aebo
