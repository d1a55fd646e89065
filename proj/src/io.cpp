#include "opscale/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace opscale::io {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_cell(const std::string& cell, const std::string& source, std::size_t row, std::size_t col) {
  const std::string t = trim(cell);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw Error(Errc::ParseError, source + ": row " + std::to_string(row) + ", column " + std::to_string(col) +
                                      ": cannot parse '" + t + "' as a number");
  }
  return value;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
  return f;
}

void put(std::ostream& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, ptr - buf);
}

}  // namespace

Matrix parse_matrix_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) values.push_back(parse_cell(cell, source, row, ++col));
    if (!line.empty() && line.back() == ',') {
      throw Error(Errc::ParseError, source + ": row " + std::to_string(row) + ": trailing comma");
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw Error(Errc::ParseError, source + ": row " + std::to_string(row) + " has " + std::to_string(values.size()) +
                                        " columns, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw Error(Errc::ParseError, source + ": no data rows");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return m;
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::IoError, "cannot open '" + path + "'");
  return parse_matrix_csv(f, path);
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      put(out, m(i, j));
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  auto f = open_out(path);
  write_matrix_csv(f, m);
}

VectorTuple read_tuple_csv(const std::string& path, bool transpose) {
  const Matrix m = read_matrix_csv(path);
  try {
    return transpose ? VectorTuple(m) : VectorTuple::from_rows(m);
  } catch (const Error& e) {
    if (e.code() == Errc::AllZeroSample) {
      throw Error(Errc::AllZeroSample, path + ": " + e.what());
    }
    throw;
  }
}

void write_tuple_csv(std::ostream& out, const VectorTuple& x) { write_matrix_csv(out, x.columns().transpose()); }

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace) {
  out << "iter,f,grad_norm,step_dist\n";
  for (const auto& r : trace.records) {
    out << r.iter << ',';
    put(out, r.f);
    out << ',';
    put(out, r.grad_norm);
    out << ',';
    put(out, r.step_dist);
    out << '\n';
  }
  out << "#status=" << to_string(trace.status) << '\n';
}

std::string verdict_json(const ExistenceVerdict& verdict) {
  nlohmann::ordered_json j;
  j["status"] = std::string(to_string(verdict.status));
  j["checked"] = verdict.checked;
  j["exhaustive"] = verdict.exhaustive;
  if (verdict.witness) {
    j["witness_indices"] = verdict.witness->members;
    j["k"] = verdict.witness->k;
    j["m"] = verdict.witness->m;
    j["kn_over_p"] = verdict.witness->kn_over_p;
  } else {
    j["witness_indices"] = nlohmann::json::array();
    j["k"] = nullptr;
    j["m"] = nullptr;
    j["kn_over_p"] = nullptr;
  }
  return j.dump();
}

void write_report_text(std::ostream& out, const DiagnosticsReport& r) {
  out << "operator=" << r.label << '\n';
  const std::pair<const char*, double> values[] = {{"eps", r.eps},       {"lambda", r.lambda}, {"sigma1", r.sigma1},
                                                   {"sigma2", r.sigma2}, {"size", r.size},     {"cheeger_ub", r.cheeger_ub}};
  for (const auto& [key, v] : values) {
    out << key << '=';
    put(out, v);
    out << '\n';
  }
  out << "n=" << r.n << "\np=" << r.p << "\nseed=" << r.seed << '\n';
}

void write_report_csv_header(std::ostream& out) {
  out << "operator,eps,lambda,sigma1,sigma2,size,cheeger_ub,n,p,seed\n";
}

void write_report_csv_row(std::ostream& out, const DiagnosticsReport& r) {
  out << r.label;
  for (double v : {r.eps, r.lambda, r.sigma1, r.sigma2, r.size, r.cheeger_ub}) {
    out << ',';
    put(out, v);
  }
  out << ',' << r.n << ',' << r.p << ',' << r.seed << '\n';
}

}  // namespace opscale::io
