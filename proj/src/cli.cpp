#include "opscale/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "opscale/expander.hpp"
#include "opscale/io.hpp"
#include "opscale/sampling.hpp"
#include "opscale/tyler.hpp"

namespace opscale::cli {

namespace {

struct Globals {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_prefix = "opscale";
};

struct EstimateArgs {
  std::string input;
  bool transpose = false;
  double tol = 1e-8;
  int max_iters = 10000;
  bool check_existence = true;
  Index exhaustive_limit = 16;
};

struct DiagnoseArgs {
  std::string input;
  bool transpose = false;
  Index budget_spans = 2;
  Index budget_random = 8;
  bool with_scaled = false;
  double tol = 1e-8;
};

struct ModelArgs {
  Index p = 0;
  std::string shape = "identity";
  std::string u = "const";
};

struct SimulateArgs {
  ModelArgs model;
  Index n = 0;
};

struct SweepArgs {
  ModelArgs model;
  std::vector<Index> n_list;
  int trials = 20;
  std::string metric = "op";
  double tol = 1e-8;
  int max_iters = 10000;
};

struct ConvergeArgs {
  ModelArgs model;
  Index n = 0;
  double tol = 1e-10;
  int max_iters = 10000;
  double tail_fraction = 1.0;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
  return f;
}

PDMatrix load_shape(const std::string& spec, Index p) {
  if (spec == "identity") return PDMatrix(Matrix::Identity(p, p), Normalization::trace_p);
  const Matrix m = io::read_matrix_csv(spec);
  if (m.rows() != p || m.cols() != p) {
    throw Error(Errc::DimMismatch, "shape file '" + spec + "' is " + std::to_string(m.rows()) + "x" +
                                       std::to_string(m.cols()) + ", expected " + std::to_string(p) + "x" +
                                       std::to_string(p));
  }
  return normalize(PDMatrix(m), Normalization::trace_p);
}

EllipticalSpec make_spec(const ModelArgs& model, std::uint64_t seed) {
  if (model.p < 1) throw Error(Errc::InvalidArgument, "--p must be at least 1");
  return EllipticalSpec{model.p, load_shape(model.shape, model.p), parse_radial_law(model.u), seed};
}

// Seed of the (n, trial) stream of a sweep; independent of scheduling.
std::uint64_t trial_seed(std::uint64_t seed, Index n, int trial) {
  Rng rng(seed, {0x7377656570ULL, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial)});
  return rng.engine()();
}

int exit_for(const EstimateResult& r) {
  if (r.verdict.checked && r.verdict.status == ExistenceStatus::NoSolution) return kNotSolved;
  return r.trace.status == RunStatus::Converged ? kOk : kNotSolved;
}

int cmd_estimate(const Globals& g, const EstimateArgs& a, std::ostream& out) {
  const VectorTuple x = io::read_tuple_csv(a.input, a.transpose);
  EstimateOptions opts;
  opts.tol = a.tol;
  opts.max_iters = a.max_iters;
  opts.check_existence = a.check_existence;
  opts.exhaustive_limit = a.exhaustive_limit;
  const EstimateResult r = estimate(x, opts);

  io::write_matrix_csv(g.out_prefix + ".shape.csv", r.sigma_hat.matrix());
  {
    auto f = open_out(g.out_prefix + ".trace.csv");
    io::write_trace_csv(f, r.trace);
  }
  {
    auto f = open_out(g.out_prefix + ".verdict.jsonl");
    f << io::verdict_json(r.verdict) << '\n';
  }
  out << "status=" << to_string(r.trace.status) << "\niterations=" << r.trace.iterations()
      << "\nresidual=" << r.residual << "\nverdict=" << to_string(r.verdict.status) << '\n';
  if (!r.trace.reason.empty()) out << "reason=" << r.trace.reason << '\n';
  return exit_for(r);
}

io::DiagnosticsReport diagnose_map(const std::string& label, const VectorTuple& unit, const DiagnoseArgs& a,
                                   std::uint64_t seed) {
  const CPMap phi(unit);
  const ExpansionReport rep = expansion_constant(phi);
  CandidateBudget budget;
  budget.span_size = a.budget_spans;
  budget.random_count = a.budget_random;
  budget.seed = seed;
  const CheegerBound ch = cheeger_upper_bound(unit, budget);
  io::DiagnosticsReport d;
  d.label = label;
  d.eps = rep.eps;
  d.lambda = rep.lambda;
  d.sigma1 = rep.sigma1;
  d.sigma2 = rep.sigma2;
  d.size = rep.size;
  d.cheeger_ub = ch.value;
  d.n = unit.n();
  d.p = unit.p();
  d.seed = seed;
  return d;
}

int cmd_diagnose(const Globals& g, const DiagnoseArgs& a, std::ostream& out) {
  const VectorTuple unit = io::read_tuple_csv(a.input, a.transpose).unit_normalized();
  std::vector<io::DiagnosticsReport> reports;
  reports.push_back(diagnose_map("samples", unit, a, g.seed));
  if (a.with_scaled) {
    EstimateOptions opts;
    opts.tol = a.tol;
    opts.check_existence = false;
    const EstimateResult r = estimate(unit, opts);
    const CPMap scaled = scaled_operator(unit, r.sigma_hat);
    reports.push_back(diagnose_map("scaled", scaled.vectors(), a, g.seed));
  }
  auto text = open_out(g.out_prefix + ".diag.txt");
  auto csv = open_out(g.out_prefix + ".diag.csv");
  io::write_report_csv_header(csv);
  for (const auto& r : reports) {
    io::write_report_text(out, r);
    io::write_report_text(text, r);
    io::write_report_csv_row(csv, r);
  }
  return kOk;
}

int cmd_simulate(const Globals& g, const SimulateArgs& a, std::ostream& out) {
  if (a.n < 1) throw Error(Errc::InvalidArgument, "--n must be at least 1");
  const EllipticalSpec spec = make_spec(a.model, g.seed);
  const VectorTuple x = sample_elliptical(spec, a.n);
  const std::string path = g.out_prefix + ".samples.csv";
  {
    auto f = open_out(path);
    io::write_tuple_csv(f, x);
  }
  auto meta = open_out(g.out_prefix + ".samples.meta");
  meta << "p=" << a.model.p << " n=" << a.n << " seed=" << g.seed << " u_dist=" << to_string(spec.u_dist)
       << " shape=" << a.model.shape << '\n';
  out << "wrote " << path << '\n';
  return kOk;
}

double median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }), v.end());
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

struct TrialRow {
  Index n = 0;
  int trial = 0;
  double err_op = std::numeric_limits<double>::quiet_NaN();
  double err_frob = std::numeric_limits<double>::quiet_NaN();
  Index iters = 0;
  std::string status;
};

int cmd_sweep(const Globals& g, const SweepArgs& a, std::ostream& out, std::ostream& err) {
  if (a.trials < 1) throw Error(Errc::InvalidArgument, "--trials must be at least 1");
  if (a.n_list.empty()) throw Error(Errc::InvalidArgument, "--n-list is empty");
  if (a.metric != "op" && a.metric != "frob") throw Error(Errc::InvalidArgument, "--metric must be op or frob");
  const EllipticalSpec base = make_spec(a.model, g.seed);
  for (Index n : a.n_list) {
    if (n < base.p + 1) throw Error(Errc::InvalidArgument, "every n must be at least p + 1");
  }
  const PDMatrix truth = normalize(base.shape, Normalization::trace_p);

  std::vector<TrialRow> rows(a.n_list.size() * static_cast<std::size_t>(a.trials));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t idx = next++; idx < rows.size(); idx = next++) {
      TrialRow& row = rows[idx];
      row.n = a.n_list[idx / static_cast<std::size_t>(a.trials)];
      row.trial = static_cast<int>(idx % static_cast<std::size_t>(a.trials));
      EllipticalSpec spec = base;
      spec.seed = trial_seed(g.seed, row.n, row.trial);
      try {
        EstimateOptions opts;
        opts.tol = a.tol;
        opts.max_iters = a.max_iters;
        opts.check_existence = false;
        const EstimateResult r = estimate(sample_elliptical(spec, row.n), opts);
        row.iters = r.trace.iterations();
        row.status = std::string(to_string(r.trace.status));
        if (r.trace.status == RunStatus::Converged) {
          row.err_op = error_op(r.sigma_hat, truth);
          row.err_frob = error_frob(r.sigma_hat, truth);
        }
      } catch (const Error& e) {
        row.status = std::string(to_string(e.code()));
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(g.jobs, static_cast<int>(rows.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  {
    auto f = open_out(g.out_prefix + ".sweep.csv");
    f << "n,trial,err_op,err_frob,iters,status\n";
    for (const auto& r : rows) {
      f << r.n << ',' << r.trial << ',' << r.err_op << ',' << r.err_frob << ',' << r.iters << ',' << r.status << '\n';
    }
  }
  auto f = open_out(g.out_prefix + ".sweep_summary.csv");
  f << "n,median_err_op,median_err_frob,ratio_" << a.metric << '\n';
  out << "n,median_err_op,median_err_frob,ratio_" << a.metric << '\n';
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < a.n_list.size(); ++k) {
    std::vector<double> op, fr;
    for (int t = 0; t < a.trials; ++t) {
      const auto& r = rows[k * static_cast<std::size_t>(a.trials) + static_cast<std::size_t>(t)];
      op.push_back(r.err_op);
      fr.push_back(r.err_frob);
      if (r.status != "Converged") err << "warning: n=" << r.n << " trial=" << r.trial << " status=" << r.status << '\n';
    }
    const double mop = median(op);
    const double mfr = median(fr);
    const double current = a.metric == "op" ? mop : mfr;
    std::ostringstream line;
    line << a.n_list[k] << ',' << mop << ',' << mfr << ',';
    if (k > 0) line << prev / current;
    line << '\n';
    f << line.str();
    out << line.str();
    prev = current;
  }
  return kOk;
}

int cmd_converge(const Globals& g, const ConvergeArgs& a, std::ostream& out, std::ostream& err) {
  if (a.n < 1) throw Error(Errc::InvalidArgument, "--n must be at least 1");
  const EllipticalSpec spec = make_spec(a.model, g.seed);
  if (a.n < 40 * spec.p) {
    err << "warning: n = " << a.n << " is below 40 p = " << 40 * spec.p
        << "; linear convergence may not be visible\n";
  }
  EstimateOptions opts;
  opts.tol = a.tol;
  opts.max_iters = a.max_iters;
  opts.check_existence = false;
  const EstimateResult r = estimate(sample_elliptical(spec, a.n), opts);
  {
    auto f = open_out(g.out_prefix + ".converge.csv");
    io::write_trace_csv(f, r.trace);
  }
  std::ostringstream summary;
  summary << "status=" << to_string(r.trace.status) << "\niterations=" << r.trace.iterations() << '\n';
  try {
    const RateEstimate rate = linear_rate_estimate(r.trace, a.tail_fraction);
    summary << "slope=" << rate.slope << "\nr2=" << rate.r2 << "\npoints=" << rate.points << '\n';
  } catch (const Error& e) {
    if (e.code() != Errc::InsufficientData) throw;
    summary << "rate=InsufficientData\n";
  }
  auto f = open_out(g.out_prefix + ".converge_summary.txt");
  f << summary.str();
  out << summary.str();
  return r.trace.status == RunStatus::Converged ? kOk : kNotSolved;
}

void add_model_options(CLI::App* sub, ModelArgs& m) {
  sub->add_option("--p", m.p, "dimension")->required();
  sub->add_option("--shape", m.shape, "shape matrix CSV, or 'identity'");
  sub->add_option("--u", m.u, "radial law: const | lognormal:s | pareto:a | cauchy");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tyler's M-estimator via operator scaling"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--jobs", g.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--out-prefix", g.out_prefix, "prefix of output files");

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "estimate the shape matrix of a sample CSV");
  c_est->add_option("input", est.input, "samples CSV, one sample per row")->required();
  c_est->add_flag("--transpose", est.transpose, "samples are columns");
  c_est->add_option("--tol", est.tol, "gradient-norm tolerance");
  c_est->add_option("--max-iters", est.max_iters, "iteration limit");
  c_est->add_flag("--check-existence,!--no-check-existence", est.check_existence, "classify solvability");
  c_est->add_option("--exhaustive-limit", est.exhaustive_limit, "largest n for exact classification");

  DiagnoseArgs dia;
  auto* c_dia = app.add_subcommand("diagnose", "spectral and Cheeger diagnostics of a sample CSV");
  c_dia->add_option("input", dia.input, "samples CSV, one sample per row")->required();
  c_dia->add_flag("--transpose", dia.transpose, "samples are columns");
  c_dia->add_option("--budget-spans", dia.budget_spans, "largest vector subset spanned for Cheeger candidates");
  c_dia->add_option("--budget-random", dia.budget_random, "random projections per rank");
  c_dia->add_flag("--with-scaled", dia.with_scaled, "also diagnose the estimate-scaled operator");
  c_dia->add_option("--tol", dia.tol, "tolerance of the estimate used by --with-scaled");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "draw elliptical samples");
  add_model_options(c_sim, sim.model);
  c_sim->add_option("--n", sim.n, "number of samples")->required();

  SweepArgs sw;
  std::string n_list;
  auto* c_sw = app.add_subcommand("sweep", "error against sample size");
  add_model_options(c_sw, sw.model);
  c_sw->add_option("--n-list", n_list, "comma-separated sample sizes")->required();
  c_sw->add_option("--trials", sw.trials, "trials per sample size");
  c_sw->add_option("--metric", sw.metric, "op or frob");
  c_sw->add_option("--tol", sw.tol, "gradient-norm tolerance");
  c_sw->add_option("--max-iters", sw.max_iters, "iteration limit");

  ConvergeArgs cv;
  auto* c_cv = app.add_subcommand("converge", "convergence trace and rate of one run");
  add_model_options(c_cv, cv.model);
  c_cv->add_option("--n", cv.n, "number of samples")->required();
  c_cv->add_option("--tol", cv.tol, "gradient-norm tolerance");
  c_cv->add_option("--max-iters", cv.max_iters, "iteration limit");
  c_cv->add_option("--tail-fraction", cv.tail_fraction, "fraction of the trace used for the rate fit");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }

  try {
    if (c_est->parsed()) return cmd_estimate(g, est, out);
    if (c_dia->parsed()) return cmd_diagnose(g, dia, out);
    if (c_sim->parsed()) return cmd_simulate(g, sim, out);
    if (c_sw->parsed()) {
      std::stringstream ss(n_list);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          std::size_t used = 0;
          const long long v = std::stoll(item, &used);
          if (used != item.size() || v < 1) throw std::invalid_argument(item);
          sw.n_list.push_back(static_cast<Index>(v));
        } catch (const std::exception&) {
          throw Error(Errc::InvalidArgument, "bad --n-list entry '" + item + "'");
        }
      }
      return cmd_sweep(g, sw, out, err);
    }
    if (c_cv->parsed()) return cmd_converge(g, cv, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::BudgetExceeded ? kOverBudget : kFailure;
  }
  return kFailure;
}

}  // namespace opscale::cli
