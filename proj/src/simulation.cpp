#include "msmbias/simulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <charconv>
#include <ostream>

#include "msmbias/bias.hpp"
#include "msmbias/errors.hpp"
#include "msmbias/format.hpp"
#include "msmbias/parallel.hpp"
#include "msmbias/rng.hpp"

namespace msmbias {

void validate(const Scenario& s) {
  validate(s.params);
  if (s.id.empty()) throw DomainError(ErrorCode::invalid_parameter, "scenario id is empty");
  if (s.n < 2) throw DomainError(ErrorCode::invalid_parameter, "scenario n must be >= 2");
  if (s.reps < 2) throw DomainError(ErrorCode::invalid_parameter, "scenario reps must be >= 2");
  if (s.setting != TreatmentSetting::from_l && s.setting != TreatmentSetting::from_lstar) {
    throw DomainError(ErrorCode::invalid_parameter, "setting must be 1 or 2");
  }
}

std::vector<Scenario> builtin_scenarios() {
  struct Row {
    const char* id;
    double p0, p1, lambda, pi0, pi1;
  };
  constexpr std::array<Row, 5> table{{
      {"0", 0.0, 1.0, 0.50, 0.50, 0.75},
      {"1", 0.05, 0.90, 0.50, 0.90, 0.45},
      {"2", 0.05, 0.90, 0.80, 0.25, 0.75},
      {"3", 0.05, 0.90, 0.80, 0.50, 0.75},
      {"4", 0.05, 0.90, 0.45, 0.50, 0.75},
  }};
  std::vector<Scenario> out;
  for (const auto& r : table) {
    Scenario s;
    s.id = r.id;
    s.params = {r.lambda, r.pi0, r.pi1, r.p0, r.p1, 1.0, 1.0, 2.0, 1.0};
    out.push_back(s);
  }
  return out;
}

Scenario find_scenario(const std::vector<Scenario>& catalog, const std::string& id) {
  for (const auto& s : catalog)
    if (s.id == id) return s;
  throw DomainError(ErrorCode::invalid_parameter, "unknown scenario '" + id + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<Scenario> parse_scenarios(std::istream& in, const std::string& source) {
  std::vector<Scenario> out;
  std::vector<int> header_lines;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    return DomainError(ErrorCode::parse, source + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw fail("unterminated section header");
      std::string_view inner = trim(t.substr(1, t.size() - 2));
      constexpr std::string_view prefix = "scenario";
      if (inner.substr(0, prefix.size()) != prefix) {
        throw fail("expected [scenario <id>]");
      }
      std::string_view id = trim(inner.substr(prefix.size()));
      if (id.empty()) throw fail("scenario id is missing");
      for (const auto& s : out)
        if (s.id == id) throw fail("duplicate scenario id '" + std::string(id) + "'");
      Scenario s;
      s.id = std::string(id);
      out.push_back(s);
      header_lines.push_back(lineno);
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw fail("expected key = value");
    if (out.empty()) throw fail("key outside a [scenario] section");
    const std::string key(trim(t.substr(0, eq)));
    const std::string_view raw = trim(t.substr(eq + 1));
    Scenario& s = out.back();
    auto number = [&]() {
      auto v = parse_double(raw);
      if (!v) throw fail("value of '" + key + "' is not a number: '" + std::string(raw) + "'");
      return *v;
    };
    auto integer = [&]() {
      const double v = number();
      if (v != std::floor(v) || v < 0 || v > 9.0e15) {
        throw fail("value of '" + key + "' must be a non-negative integer");
      }
      return v;
    };
    if (key == "lambda") s.params.lambda = number();
    else if (key == "pi0") s.params.pi0 = number();
    else if (key == "pi1") s.params.pi1 = number();
    else if (key == "p0") s.params.p0 = number();
    else if (key == "p1") s.params.p1 = number();
    else if (key == "alpha") s.params.alpha = number();
    else if (key == "beta") s.params.beta = number();
    else if (key == "gamma") s.params.gamma = number();
    else if (key == "sigma") s.params.sigma = number();
    else if (key == "n") s.n = static_cast<int>(integer());
    else if (key == "reps") s.reps = static_cast<int>(integer());
    else if (key == "setting") {
      const double v = integer();
      if (v != 1 && v != 2) throw fail("setting must be 1 or 2");
      s.setting = static_cast<TreatmentSetting>(static_cast<int>(v));
    } else if (key == "seed") {
      std::uint64_t seed = 0;
      auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), seed);
      if (ec != std::errc() || ptr != raw.data() + raw.size()) throw fail("seed must be an unsigned 64-bit integer");
      s.seed = seed;
    } else {
      throw fail("unknown key '" + key + "'");
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    try {
      validate(out[i]);
    } catch (const DomainError& e) {
      lineno = header_lines[i];
      throw fail(std::string("scenario '") + out[i].id + "': " + e.what());
    }
  }
  return out;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError(ErrorCode::parse, "cannot open scenario file '" + path + "'");
  return parse_scenarios(in, path);
}

void write_scenarios(std::ostream& out, const std::vector<Scenario>& scenarios) {
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& s = scenarios[i];
    if (i > 0) out << '\n';
    out << "[scenario " << s.id << "]\n"
        << "p0 = " << format_double(s.params.p0) << '\n'
        << "p1 = " << format_double(s.params.p1) << '\n'
        << "lambda = " << format_double(s.params.lambda) << '\n'
        << "pi0 = " << format_double(s.params.pi0) << '\n'
        << "pi1 = " << format_double(s.params.pi1) << '\n'
        << "alpha = " << format_double(s.params.alpha) << '\n'
        << "beta = " << format_double(s.params.beta) << '\n'
        << "gamma = " << format_double(s.params.gamma) << '\n'
        << "sigma = " << format_double(s.params.sigma) << '\n'
        << "n = " << s.n << '\n'
        << "reps = " << s.reps << '\n'
        << "setting = " << static_cast<int>(s.setting) << '\n'
        << "seed = " << s.seed << '\n';
  }
}

Dataset generate_dataset(const Scenario& s, std::uint64_t replicate) {
  const LatentParams& p = s.params;
  Dataset d;
  d.info = {s.seed, s.id, static_cast<int>(s.setting), replicate};
  rng::Engine eng(rng::substream_seed(s.seed, rng::fnv1a(s.id), replicate));
  d.records.resize(static_cast<std::size_t>(s.n));
  for (auto& r : d.records) {
    r.l = rng::bernoulli(eng, p.lambda);
    r.lstar = rng::bernoulli(eng, r.l ? p.p1 : p.p0);
    const int driver = s.setting == TreatmentSetting::from_l ? r.l : r.lstar;
    r.a = rng::bernoulli(eng, driver ? p.pi1 : p.pi0);
    r.y = p.alpha + p.beta * r.a + p.gamma * r.l + p.sigma * rng::standard_normal(eng);
  }
  return d;
}

const PerformanceRow& SimulationReport::row(const std::string& scenario_id, Estimator e,
                                            int n) const {
  for (const auto& r : rows)
    if (r.scenario_id == scenario_id && r.estimator == e && r.n == n) return r;
  throw DomainError(ErrorCode::invalid_parameter, "no report row for scenario '" + scenario_id + "'");
}

PerformanceRow summarize(const std::vector<ReplicateEstimate>& estimates, double beta) {
  PerformanceRow row;
  row.beta = beta;
  std::vector<double> est, se, sq;
  double covered = 0.0;
  for (const auto& e : estimates) {
    if (!e.ok) {
      ++row.failed;
      continue;
    }
    est.push_back(e.estimate);
    se.push_back(e.se);
    sq.push_back((e.estimate - beta) * (e.estimate - beta));
    if (e.ci_low <= beta && beta <= e.ci_high) covered += 1.0;
  }
  row.reps = static_cast<int>(est.size());
  const double k = static_cast<double>(est.size());
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto sd = [&](const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (static_cast<double>(v.size()) - 1.0));
  };
  if (est.size() < 2) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.bias = row.mse = row.coverage = row.emp_se = row.model_se = {nan, nan};
    return row;
  }
  const double emp_se = sd(est);
  row.bias = {mean(est) - beta, emp_se / std::sqrt(k)};
  row.emp_se = {emp_se, emp_se / std::sqrt(2.0 * (k - 1.0))};
  row.mse = {mean(sq), sd(sq) / std::sqrt(k)};
  const double c = covered / k;
  row.coverage = {c, std::sqrt(c * (1.0 - c) / k)};
  row.model_se = {mean(se), sd(se) / std::sqrt(k)};
  return row;
}

SimulationReport run_scenario(const Scenario& s, const RunOptions& options) {
  validate(s);
  const auto reps = static_cast<std::size_t>(s.reps);
  std::vector<ReplicateEstimate> cm(reps), msm(reps);
  parallel_for(reps, options.workers, [&](std::size_t i) {
    const Dataset d = generate_dataset(s, i);
    auto record = [&](ReplicateEstimate& slot, auto&& fit) {
      try {
        const FitResult f = fit();
        slot = {true, f.ate_hat, f.model_se, f.ci_low, f.ci_high};
      } catch (const DomainError&) {
        slot.ok = false;
      }
    };
    record(cm[i], [&] { return fit_conditional(d, options.adjustment); });
    record(msm[i], [&] { return fit_msm_ipw(d, options.adjustment); });
  });

  std::optional<double> formula_cm, formula_msm;
  if (s.setting == TreatmentSetting::from_lstar || options.adjustment == Adjustment::l) {
    formula_cm = formula_msm = 0.0;
  } else {
    try {
      formula_cm = bias_conditional(s.params);
      formula_msm = bias_msm(s.params);
    } catch (const DomainError&) {
    }
  }

  SimulationReport report;
  for (auto e : {Estimator::conditional, Estimator::msm_ipw}) {
    PerformanceRow row = summarize(e == Estimator::conditional ? cm : msm, s.params.beta);
    row.scenario_id = s.id;
    row.estimator = e;
    row.n = s.n;
    row.setting = static_cast<int>(s.setting);
    row.bias_formula = e == Estimator::conditional ? formula_cm : formula_msm;
    if (row.failed > 0) {
      report.warnings.push_back("scenario " + s.id + ", " + std::string(to_string(e)) + ", n=" +
                                std::to_string(s.n) + ": " + std::to_string(row.failed) +
                                " replicate(s) failed and were excluded");
    }
    report.rows.push_back(row);
  }
  return report;
}

void merge(SimulationReport& into, SimulationReport&& from) {
  for (auto& r : from.rows) into.rows.push_back(std::move(r));
  for (auto& w : from.warnings) into.warnings.push_back(std::move(w));
}

void write_report_csv(std::ostream& out, const SimulationReport& report) {
  out << "estimator,scenario,n,setting,reps,failed,bias_formula,bias,bias_mcse,mse,mse_mcse,"
         "coverage,coverage_mcse,emp_se,emp_se_mcse,model_se,model_se_mcse\n";
  for (const auto& r : report.rows) {
    out << to_string(r.estimator) << ',' << csv_field(r.scenario_id) << ',' << r.n << ','
        << r.setting << ',' << r.reps << ',' << r.failed << ','
        << (r.bias_formula ? format_double(*r.bias_formula) : std::string()) << ',';
    for (const Measure* m : {&r.bias, &r.mse, &r.coverage, &r.emp_se, &r.model_se}) {
      out << format_double(m->value) << ',' << format_double(m->mcse)
          << (m == &r.model_se ? '\n' : ',');
    }
  }
}

}  // namespace msmbias
