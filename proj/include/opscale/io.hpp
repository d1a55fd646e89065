#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "opscale/sinkhorn.hpp"
#include "opscale/tyler.hpp"

namespace opscale::io {

/// Row-major, comma-separated decimals, no header. Blank lines are skipped.
/// ParseError messages cite the 1-based row.
Matrix parse_matrix_csv(std::istream& in, const std::string& source = "<stream>");
Matrix read_matrix_csv(const std::string& path);

/// Writes with 17 significant digits so values round-trip exactly.
void write_matrix_csv(std::ostream& out, const Matrix& m);
void write_matrix_csv(const std::string& path, const Matrix& m);

/// One sample per row; with transpose, one sample per column.
VectorTuple read_tuple_csv(const std::string& path, bool transpose = false);
void write_tuple_csv(std::ostream& out, const VectorTuple& x);

/// Header iter,f,grad_norm,step_dist, one row per record, then "#status=...".
void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace);

/// Single-line JSON: status, witness indices, k, m, kn_over_p.
std::string verdict_json(const ExistenceVerdict& verdict);

struct DiagnosticsReport {
  std::string label;  // which operator was diagnosed
  double eps = 0.0;
  double lambda = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double size = 0.0;
  double cheeger_ub = 0.0;
  Index n = 0;
  Index p = 0;
  std::uint64_t seed = 0;
};

void write_report_text(std::ostream& out, const DiagnosticsReport& r);
void write_report_csv_header(std::ostream& out);
void write_report_csv_row(std::ostream& out, const DiagnosticsReport& r);

}  // namespace opscale::io
