#include "floquetlab/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "floquetlab/cantor.hpp"
#include "floquetlab/cli/pool.hpp"
#include "floquetlab/dynamics.hpp"
#include "floquetlab/error.hpp"
#include "floquetlab/kicked.hpp"
#include "floquetlab/numtheory.hpp"
#include "floquetlab/spectra.hpp"

namespace floquetlab::cli {

namespace {

using json = nlohmann::ordered_json;
using KeyList = std::vector<std::pair<std::string, std::string>>;

const std::map<std::string, KeyList>& key_table() {
  static const std::map<std::string, KeyList> table{
      {"bscan",
       {{"gamma", "0.75"},
        {"omega", "golden"},
        {"hbar", "1"},
        {"period", "1"},
        {"rank", "1"},
        {"vector", "1"},
        {"ladder", "pow2:10:16"},
        {"x_points", "64"},
        {"x_grid", ""},
        {"variant", "combescure"},
        {"growth_slope", "0.1"},
        {"saturation_change", "0.01"}}},
      {"discrepancy",
       {{"j", "1"}, {"beta", "golden"}, {"ladder", "pow2:10:16"}, {"et_m", "32"}, {"min_digits", "9"}}},
      {"weyl", {{"j", "2"}, {"beta", "sqrt2"}, {"h", "1"}, {"ladder", "decades:2:5:4"}}},
      {"dynamics",
       {{"dim", "256"},
        {"gamma", "1.5"},
        {"rank", "1"},
        {"lambda", "1"},
        {"omega", "golden"},
        {"poly", ""},
        {"hbar", "1"},
        {"period", "1"},
        {"ordering", "kick_after_free"},
        {"kick_sign", "-1"},
        {"kicks", "1000"},
        {"initial", "1"},
        {"pairs", ""}}},
      {"cantor", {{"points", "2048"}, {"depth", "52"}}},
      {"phitilde",
       {{"omega_points", "2001"},
        {"kappa_points", "101"},
        {"omega_min", "-10"},
        {"omega_max", "10"}}},
      {"deltaeps", {{"epsilons", "1,0.1,0.01"}, {"t_points", "401"}}},
      {"topdemo",
       {{"c1", "1"}, {"c4", "0.5"}, {"c3", "0"}, {"period", "1"}, {"kicks", "100"}, {"initial", "1"}}},
  };
  return table;
}

void check_keys(const RunConfig& cfg) {
  const auto it = key_table().find(cfg.subcommand);
  if (it == key_table().end()) throw ConfigError("unknown subcommand '" + cfg.subcommand + "'");
  for (const auto& [k, v] : cfg.params) {
    const bool known = std::any_of(it->second.begin(), it->second.end(),
                                   [&](const auto& kv) { return kv.first == k; });
    if (!known) throw ConfigError(cfg.subcommand + ": unknown key '" + k + "'");
  }
}

void guard_cells(double cells, const std::string& what) {
  if (cells > kMaxCells) {
    std::ostringstream os;
    os << what << ": " << cells << " cells exceeds the limit of " << kMaxCells;
    throw ResourceGuardError(os.str());
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

IrrationalSpec irrational(const RunConfig& cfg, const std::string& key, const std::string& fallback) {
  try {
    return IrrationalSpec::parse(cfg.get_string(key, fallback));
  } catch (const DomainError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

Cell cell(std::size_t v) { return static_cast<std::int64_t>(v); }
Cell cell(int v) { return static_cast<std::int64_t>(v); }
Cell cell(double v) { return v; }
Cell cell(const std::string& s) { return s; }
Cell empty() { return std::monostate{}; }

Artifact table_artifact(const Table& t, const RunConfig& cfg) {
  if (cfg.format == "json") return {t.name + ".json", t.to_json()};
  return {t.name + ".csv", t.to_csv()};
}

Artifact json_artifact(const std::string& name, const json& j) { return {name, j.dump(2) + "\n"}; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::optional<PowerLawFit> try_fit(const std::vector<double>& n, const std::vector<double>& v) {
  try {
    return exponent_fit(n, v);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------- bscan

struct BScanPlan {
  double gamma;
  IrrationalSpec omega;
  double hbar, period;
  std::size_t rank, vector;
  BScanConfig scan;
};

BScanPlan prepare_bscan(const RunConfig& cfg) {
  BScanPlan p{cfg.get_double("gamma", 0.75), irrational(cfg, "omega", "golden"),
              cfg.get_double("hbar", 1.0), cfg.get_double("period", 1.0),
              cfg.get_size("rank", 1), cfg.get_size("vector", 1), {}};
  require(p.gamma > 0.0 && p.gamma <= 10.0, "bscan: gamma must lie in (0, 10]");
  require(p.hbar > 0.0 && p.period > 0.0, "bscan: hbar and period must be positive");
  p.scan.ladder = cfg.get_ladder("ladder", "pow2:10:16");
  const std::size_t dim = p.scan.ladder.back();
  require(p.rank >= 1 && p.rank <= dim / 2, "bscan: rank must lie in [1, max(N)/2]");
  require(p.vector >= 1 && p.vector <= p.rank, "bscan: vector must lie in [1, rank]");
  if (cfg.has("x_grid")) {
    p.scan.x_grid = cfg.get_doubles("x_grid", {});
  } else {
    const std::size_t m = cfg.get_size("x_points", 64);
    require(m >= 1, "bscan: x_points must be >= 1");
    guard_cells(static_cast<double>(m), "bscan x grid");
    for (std::size_t i = 0; i < m; ++i)
      p.scan.x_grid.push_back(kTwoPi * (static_cast<double>(i) + 0.5) / static_cast<double>(m));
  }
  p.scan.variant = count_variant_from_string(cfg.get_string("variant", "combescure"));
  p.scan.thresholds.growth_slope = cfg.get_double("growth_slope", 0.1);
  p.scan.thresholds.saturation_change = cfg.get_double("saturation_change", 0.01);
  require(p.scan.thresholds.saturation_change > 0.0, "bscan: saturation_change must be positive");
  guard_cells(static_cast<double>(dim), "bscan truncation");
  guard_cells(static_cast<double>(p.scan.x_grid.size()) * static_cast<double>(p.scan.ladder.size()),
              "bscan sweep");
  p.scan.validate();
  return p;
}

std::vector<Artifact> run_bscan(const RunConfig& cfg, std::size_t threads) {
  const BScanPlan p = prepare_bscan(cfg);
  const std::size_t dim = p.scan.ladder.back();
  const double omega = p.omega.to_double();
  const EigenvaluePolynomial poly({0.0, kTwoPi * omega});
  const auto thetas = eigenphase_sequence(h0_eigenvalues(poly, p.hbar, dim), p.period, p.hbar);
  const auto vectors = build_perturbation_vectors(p.gamma, dim, p.rank);
  const PerturbationVector& psi = vectors[p.vector - 1];

  std::vector<double> disc(p.scan.ladder.size());
  parallel_for(disc.size(), threads, [&](std::size_t i) {
    const std::size_t rung[] = {p.scan.ladder[i]};
    disc[i] = ladder_discrepancies(thetas, rung).front();
  });
  std::vector<BScanSeries> series(p.scan.x_grid.size());
  parallel_for(series.size(), threads, [&](std::size_t i) {
    series[i] = scan_point(p.scan.x_grid[i], psi, thetas, p.scan, disc);
  });

  Table t{"bscan",
          {"x", "N", "b_inverse", "count_S", "A", "two_N_pow", "N_times_DN", "variant", "reason"},
          {}};
  const std::string variant = to_string(p.scan.variant);
  json sj = json::array();
  std::size_t growth = 0, saturated = 0;
  for (const auto& s : series) {
    if (s.singular) {
      std::ostringstream reason;
      reason << "singular: x coincides with theta_" << s.singular_index;
      t.add_row({cell(s.x), empty(), empty(), empty(), empty(), empty(), empty(), cell(variant),
                 cell(reason.str())});
    }
    for (const auto& c : s.cells) {
      const double two_n_pow = 2.0 * std::pow(static_cast<double>(c.n), 1.0 - p.gamma);
      const double ndn = static_cast<double>(c.n) *
                         disc[static_cast<std::size_t>(
                             std::find(p.scan.ladder.begin(), p.scan.ladder.end(), c.n) -
                             p.scan.ladder.begin())];
      t.add_row({cell(c.x), cell(c.n), cell(c.b_inverse), cell(c.count_s),
                 c.interval_valid ? cell(c.interval.count) : empty(), cell(two_n_pow), cell(ndn),
                 cell(variant), c.interval_valid ? cell(std::string()) : cell(std::string("J_N outside [0,1)"))});
    }
    growth += s.growth;
    saturated += s.saturated;
    sj.push_back({{"x", s.x},
                  {"singular", s.singular},
                  {"b_slope", s.singular ? json(nullptr) : json(s.b_slope)},
                  {"a_slope", s.a_slope_valid ? json(s.a_slope) : json(nullptr)},
                  {"monotone", s.monotone},
                  {"growth", s.growth},
                  {"saturated", s.saturated}});
  }
  const double m = static_cast<double>(series.size());
  json summary{{"gamma", p.gamma},
               {"omega", p.omega.label()},
               {"ladder", p.scan.ladder},
               {"variant", variant},
               {"growth_slope_threshold", p.scan.thresholds.growth_slope},
               {"saturation_change_threshold", p.scan.thresholds.saturation_change},
               {"growth_fraction", static_cast<double>(growth) / m},
               {"saturation_fraction", static_cast<double>(saturated) / m},
               {"series", sj}};
  return {table_artifact(t, cfg), json_artifact("bscan.json", summary)};
}

// ---------------------------------------------------------- discrepancy

struct DiscrepancyPlan {
  unsigned j;
  IrrationalSpec beta;
  std::vector<std::size_t> ladder;
  std::size_t et_m;
  double min_digits;
};

DiscrepancyPlan prepare_discrepancy(const RunConfig& cfg) {
  DiscrepancyPlan p{static_cast<unsigned>(cfg.get_size("j", 1)), irrational(cfg, "beta", "golden"),
                    cfg.get_ladder("ladder", "pow2:10:16"), cfg.get_size("et_m", 32),
                    cfg.get_double("min_digits", 9.0)};
  require(p.j >= 1 && p.j <= 8, "discrepancy: j must lie in [1, 8]");
  require(p.et_m >= 1, "discrepancy: et_m must be >= 1");
  const double n_max = static_cast<double>(p.ladder.back());
  require(std::pow(n_max, p.j) < 1.7e38, "discrepancy: N^j overflows 128 bits");
  guard_cells(n_max, "discrepancy sequence");
  guard_cells(n_max * static_cast<double>(p.et_m) / 100.0, "discrepancy Erdos-Turan sums");
  return p;
}

std::vector<Artifact> run_discrepancy(const RunConfig& cfg, std::size_t threads) {
  const DiscrepancyPlan p = prepare_discrepancy(cfg);
  const HighPrecision beta = p.beta.value();
  const bool rational = continued_fraction(p.beta, 400).terminated;
  const auto seq = sequence_mod1(p.j, DoubleDouble::from(beta), p.ladder.back());
  const double abs_beta = std::abs(static_cast<double>(beta));

  std::vector<double> d(p.ladder.size()), et(p.ladder.size());
  parallel_for(p.ladder.size(), threads, [&](std::size_t i) {
    const std::span<const double> prefix(seq.data(), p.ladder[i]);
    d[i] = discrepancy_exact(prefix);
    et[i] = erdos_turan_bound(prefix, p.et_m);
  });
  std::vector<double> nv(p.ladder.begin(), p.ladder.end());
  const auto fit = try_fit(nv, d);

  Table t{"discrepancy",
          {"j", "beta_label", "N", "D_N", "ET_bound", "fitted_slope", "rational", "precision_digits",
           "precision_warning"},
          {}};
  for (std::size_t i = 0; i < p.ladder.size(); ++i) {
    UInt128 m = 1;
    for (unsigned k = 0; k < p.j; ++k) m *= p.ladder[i];
    const double digits = fractional_digits(m, abs_beta);
    t.add_row({cell(static_cast<std::size_t>(p.j)), cell(p.beta.label()), cell(p.ladder[i]), cell(d[i]),
               cell(et[i]), fit ? cell(fit->slope) : empty(), cell(rational ? 1 : 0), cell(digits),
               cell(digits < p.min_digits ? 1 : 0)});
  }
  return {table_artifact(t, cfg)};
}

// ----------------------------------------------------------------- weyl

struct WeylPlan {
  unsigned j;
  IrrationalSpec beta;
  std::uint64_t h;
  std::vector<std::size_t> ladder;
};

WeylPlan prepare_weyl(const RunConfig& cfg) {
  WeylPlan p{static_cast<unsigned>(cfg.get_size("j", 2)), irrational(cfg, "beta", "sqrt2"),
             cfg.get_size("h", 1), cfg.get_ladder("ladder", "decades:2:5:4")};
  require(p.j >= 1 && p.j <= 8, "weyl: j must lie in [1, 8]");
  require(p.h >= 1, "weyl: h must be >= 1");
  const double n_max = static_cast<double>(p.ladder.back());
  require(std::pow(n_max, p.j) * static_cast<double>(p.h) < 1.7e38, "weyl: h N^j overflows 128 bits");
  guard_cells(n_max, "weyl sum");
  return p;
}

std::vector<Artifact> run_weyl(const RunConfig& cfg, std::size_t /*threads*/) {
  const WeylPlan p = prepare_weyl(cfg);
  const auto sums = weyl_sum_ladder(p.j, DoubleDouble::from(p.beta.value()), p.h, p.ladder);
  std::vector<double> nv(p.ladder.begin(), p.ladder.end()), mv;
  for (const auto& s : sums) mv.push_back(s.modulus);
  const auto fit = try_fit(nv, mv);
  Table t{"weyl", {"j", "beta_label", "h", "N", "re", "im", "modulus", "fitted_exponent"}, {}};
  for (std::size_t i = 0; i < sums.size(); ++i)
    t.add_row({cell(static_cast<std::size_t>(p.j)), cell(p.beta.label()), cell(static_cast<std::size_t>(p.h)),
               cell(p.ladder[i]), cell(sums[i].sum.real()), cell(sums[i].sum.imag()),
               cell(sums[i].modulus), fit ? cell(fit->slope) : empty()});
  return {table_artifact(t, cfg)};
}

// ------------------------------------------------------------- dynamics

struct DynamicsPlan {
  KickedSystemSpec spec;
  std::size_t kicks;
  bool random_initial;
  std::size_t initial;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

DynamicsPlan prepare_dynamics(const RunConfig& cfg) {
  DynamicsPlan p;
  const std::size_t dim = cfg.get_size("dim", 256);
  require(dim >= 4, "dynamics: dim must be >= 4");
  guard_cells(static_cast<double>(dim) * static_cast<double>(dim), "dynamics matrix");
  p.kicks = cfg.get_size("kicks", 1000);
  require(p.kicks >= 100, "dynamics: kicks must be >= 100 for the growth classification");
  guard_cells(static_cast<double>(dim) * static_cast<double>(p.kicks + 1), "dynamics trace");

  const double gamma = cfg.get_double("gamma", 1.5);
  require(gamma > 0.0 && gamma <= 10.0, "dynamics: gamma must lie in (0, 10]");
  const std::size_t rank = cfg.get_size("rank", 1);
  require(rank >= 1 && rank <= dim / 2, "dynamics: rank must lie in [1, dim/2]");
  const double hbar = cfg.get_double("hbar", 1.0), period = cfg.get_double("period", 1.0);
  require(hbar > 0.0 && period > 0.0, "dynamics: hbar and period must be positive");

  std::vector<double> beta;
  if (cfg.has("poly")) {
    beta = cfg.get_doubles("poly", {});
  } else {
    beta = {0.0, kTwoPi * irrational(cfg, "omega", "golden").to_double()};
  }
  try {
    p.spec = make_kicked_system(EigenvaluePolynomial(beta), dim, gamma, rank,
                                cfg.get_double("lambda", 1.0), period, hbar);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("dynamics: ") + e.what());
  }
  const std::string ordering = cfg.get_string("ordering", "kick_after_free");
  require(ordering == "kick_after_free" || ordering == "kick_before_free",
          "dynamics: ordering must be kick_after_free or kick_before_free");
  p.spec.ordering = ordering == "kick_after_free" ? KickOrdering::kick_after_free : KickOrdering::kick_before_free;
  const double sign = cfg.get_double("kick_sign", -1.0);
  require(sign == 1.0 || sign == -1.0, "dynamics: kick_sign must be +1 or -1");
  p.spec.kick_sign = static_cast<int>(sign);

  const std::string initial = cfg.get_string("initial", "1");
  p.random_initial = initial == "random";
  p.initial = p.random_initial ? 0 : cfg.get_size("initial", 1);
  require(p.initial < dim, "dynamics: initial level must be < dim");

  const std::string pairs = cfg.get_string("pairs", "");
  if (pairs.empty()) {
    p.pairs.push_back({p.initial, p.initial});
  } else {
    std::stringstream ss(pairs);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      require(colon != std::string::npos, "dynamics: pairs are written k:l");
      RunConfig tmp;
      tmp.params = {{"k", item.substr(0, colon)}, {"l", item.substr(colon + 1)}};
      const std::size_t k = tmp.get_size("k", 0), l = tmp.get_size("l", 0);
      require(k < dim && l < dim, "dynamics: pair index must be < dim");
      p.pairs.push_back({k, l});
    }
  }
  return p;
}

std::vector<Artifact> run_dynamics(const RunConfig& cfg, std::size_t threads) {
  const DynamicsPlan p = prepare_dynamics(cfg);
  const std::size_t dim = p.spec.dim;
  const auto v = build_floquet(p.spec);
  const auto alphas = h0_eigenvalues(p.spec.poly, p.spec.hbar, dim);

  std::mt19937_64 rng(cfg.seed);
  const StateVector psi0 = p.random_initial ? random_state(static_cast<Eigen::Index>(dim), rng)
                                            : StateVector::basis(static_cast<Eigen::Index>(dim),
                                                                 static_cast<Eigen::Index>(p.initial));

  std::set<std::size_t> sources;
  for (const auto& [k, l] : p.pairs) sources.insert(l);
  const std::vector<std::size_t> src(sources.begin(), sources.end());
  std::vector<DynamicsTrace> traces(src.size() + 1);
  parallel_for(traces.size(), threads, [&](std::size_t i) {
    const StateVector start = i == 0 ? psi0
                                     : StateVector::basis(static_cast<Eigen::Index>(dim),
                                                          static_cast<Eigen::Index>(src[i - 1]));
    traces[i] = evolve_trace(v, start, alphas, p.kicks);
  });
  const DynamicsTrace& main = traces[0];
  auto prob = [&](std::size_t pair, std::size_t n) {
    const auto [k, l] = p.pairs[pair];
    const auto idx = static_cast<std::size_t>(std::find(src.begin(), src.end(), l) - src.begin());
    return traces[idx + 1].populations[n][k];
  };

  std::vector<double> first(p.kicks + 1);
  for (std::size_t n = 0; n <= p.kicks; ++n) first[n] = prob(0, n);
  const CesaroSeries ces = cesaro_diagnostics(first);
  const GrowthClassification cls = classify_growth(main);

  Table t{"dynamics", {"n", "energy"}, {}};
  for (const auto& [k, l] : p.pairs) t.columns.push_back("p_" + std::to_string(k) + "_" + std::to_string(l));
  t.columns.insert(t.columns.end(), {"cesaro_avg", "norm_drift"});
  double max_drift = 0.0;
  for (std::size_t n = 0; n <= p.kicks; ++n) {
    std::vector<Cell> row{cell(n), cell(main.energy[n])};
    for (std::size_t i = 0; i < p.pairs.size(); ++i) row.push_back(cell(prob(i, n)));
    row.push_back(cell(ces.averages[n]));
    row.push_back(cell(main.norm_drift[n]));
    max_drift = std::max(max_drift, main.norm_drift[n]);
    t.add_row(std::move(row));
  }
  json side{{"classification",
             {{"label", to_string(cls.label)},
              {"slope", cls.slope},
              {"bounded", cls.bounded},
              {"envelope_ratio", number_or_null(cls.envelope_ratio)},
              {"fit_end", cls.fit_end},
              {"heisenberg_time", cls.heisenberg_time},
              {"dim", cls.dim}}},
            {"cesaro", {{"pair", t.columns[2]}, {"sum_slope", ces.sum_slope}, {"average_slope", ces.average_slope}}},
            {"max_norm_drift", max_drift},
            {"unitarity_defect", v.unitarity_defect()}};
  return {table_artifact(t, cfg), json_artifact("dynamics.json", side)};
}

// --------------------------------------------------------------- cantor

struct CantorPlan {
  std::size_t points, depth;
};

CantorPlan prepare_cantor(const RunConfig& cfg) {
  CantorPlan p{cfg.get_size("points", 2048), cfg.get_size("depth", kCantorDefaultDepth)};
  require(p.points >= 2, "cantor: points must be >= 2");
  require(p.depth >= 1 && p.depth <= 1000, "cantor: depth must lie in [1, 1000]");
  guard_cells(static_cast<double>(p.points), "cantor grid");
  return p;
}

std::vector<Artifact> run_cantor(const RunConfig& cfg, std::size_t threads) {
  const CantorPlan p = prepare_cantor(cfg);
  std::vector<double> alpha(p.points);
  std::vector<int> member(p.points);
  const double last = static_cast<double>(p.points - 1);
  parallel_for(p.points, threads, [&](std::size_t i) {
    const double x = static_cast<double>(i) / last;
    alpha[i] = cantor_value(x, p.depth);
    member[i] = in_cantor_set(x, p.depth) ? 1 : 0;
  });
  Table t{"cantor", {"x", "alpha", "in_set"}, {}};
  for (std::size_t i = 0; i < p.points; ++i)
    t.add_row({cell(static_cast<double>(i) / last), cell(alpha[i]), cell(member[i])});
  return {table_artifact(t, cfg)};
}

// ------------------------------------------------------------- phitilde

struct PhiPlan {
  std::size_t no, nk;
  double lo, hi;
};

PhiPlan prepare_phitilde(const RunConfig& cfg) {
  PhiPlan p{cfg.get_size("omega_points", 2001), cfg.get_size("kappa_points", 101),
            cfg.get_double("omega_min", -10.0), cfg.get_double("omega_max", 10.0)};
  require(p.no >= 2 && p.nk >= 2, "phitilde: need at least 2 points per axis");
  require(p.lo < p.hi, "phitilde: omega_min must be below omega_max");
  guard_cells(static_cast<double>(p.no) * static_cast<double>(p.nk), "phitilde grid");
  return p;
}

std::vector<Artifact> run_phitilde(const RunConfig& cfg, std::size_t threads) {
  const PhiPlan p = prepare_phitilde(cfg);
  const std::size_t no = p.no, nk = p.nk;
  auto omega_at = [&](std::size_t i) {
    return p.lo + (p.hi - p.lo) * static_cast<double>(i) / static_cast<double>(no - 1);
  };
  auto kappa_at = [&](std::size_t k) { return static_cast<double>(k) / static_cast<double>(nk - 1); };
  std::vector<std::array<double, 3>> vals(no * nk);
  parallel_for(no, threads, [&](std::size_t i) {
    const double w = omega_at(i);
    for (std::size_t k = 0; k < nk; ++k) {
      const double kap = kappa_at(k);
      vals[i * nk + k] = {phi_numerator(w, kap), phi_denominator(w, kap), phi_tilde(w, kap)};
    }
  });
  Table t{"phitilde", {"omega", "kappa", "numerator", "denominator", "phi_tilde"}, {}};
  t.rows.reserve(no * nk);
  for (std::size_t i = 0; i < no; ++i)
    for (std::size_t k = 0; k < nk; ++k) {
      const auto& v = vals[i * nk + k];
      t.add_row({cell(omega_at(i)), cell(kappa_at(k)), cell(v[0]), cell(v[1]), cell(v[2])});
    }
  return {table_artifact(t, cfg)};
}

// ------------------------------------------------------------- deltaeps

struct DeltaPlan {
  std::vector<double> eps;
  std::size_t nt;
};

DeltaPlan prepare_deltaeps(const RunConfig& cfg) {
  DeltaPlan p{cfg.get_doubles("epsilons", {1.0, 0.1, 0.01}), cfg.get_size("t_points", 401)};
  require(!p.eps.empty(), "deltaeps: empty epsilon list");
  for (double e : p.eps) require(e >= 1e-4 && e <= 50.0, "deltaeps: epsilon must lie in [1e-4, 50]");
  require(p.nt >= 2, "deltaeps: t_points must be >= 2");
  guard_cells(static_cast<double>(p.nt) * static_cast<double>(p.eps.size()), "deltaeps grid");
  return p;
}

std::vector<Artifact> run_deltaeps(const RunConfig& cfg, std::size_t threads) {
  const DeltaPlan p = prepare_deltaeps(cfg);
  const auto& eps = p.eps;
  const std::size_t nt = p.nt;
  const double pi = kTwoPi / 2.0;
  auto t_at = [&](std::size_t i) { return -pi + kTwoPi * static_cast<double>(i) / static_cast<double>(nt - 1); };
  struct Block {
    std::vector<std::array<double, 2>> kernel;
    double integral = 0.0, moment = 0.0;
  };
  std::vector<Block> blocks(eps.size());
  parallel_for(eps.size(), threads, [&](std::size_t b) {
    const double e = eps[b];
    const auto terms = static_cast<std::size_t>(std::ceil(40.0 / e));
    for (std::size_t i = 0; i < nt; ++i)
      blocks[b].kernel.push_back({delta_eps(t_at(i), e), delta_eps_series(t_at(i), e, terms)});
    blocks[b].integral = delta_eps_integral(e);
    blocks[b].moment = delta_eps_cos_moment(e);
  });
  Table t{"deltaeps", {"row_type", "epsilon", "t", "value", "reference", "abs_error"}, {}};
  for (std::size_t b = 0; b < eps.size(); ++b) {
    for (std::size_t i = 0; i < nt; ++i) {
      const auto& k = blocks[b].kernel[i];
      t.add_row({cell(std::string("kernel")), cell(eps[b]), cell(t_at(i)), cell(k[0]), cell(k[1]),
                 cell(std::abs(k[0] - k[1]))});
    }
    t.add_row({cell(std::string("integral")), cell(eps[b]), empty(), cell(blocks[b].integral), cell(1.0),
               cell(std::abs(blocks[b].integral - 1.0))});
    const double ref = std::exp(-eps[b]);
    t.add_row({cell(std::string("cos_moment")), cell(eps[b]), empty(), cell(blocks[b].moment), cell(ref),
               cell(std::abs(blocks[b].moment - ref))});
  }
  return {table_artifact(t, cfg)};
}

// -------------------------------------------------------------- topdemo

struct TopPlan {
  double c1, c4, c3, period;
  std::size_t kicks, initial;
};

TopPlan prepare_topdemo(const RunConfig& cfg) {
  TopPlan p{cfg.get_double("c1", 1.0),      cfg.get_double("c4", 0.5),    cfg.get_double("c3", 0.0),
            cfg.get_double("period", 1.0), cfg.get_size("kicks", 100), cfg.get_size("initial", 1)};
  require(p.period > 0.0, "topdemo: period must be positive");
  require(p.initial < 3, "topdemo: initial must be 0, 1 or 2");
  require(p.kicks >= 1, "topdemo: kicks must be >= 1");
  guard_cells(static_cast<double>(p.kicks), "topdemo trace");
  return p;
}

std::vector<Artifact> run_topdemo(const RunConfig& cfg, std::size_t /*threads*/) {
  const TopPlan p = prepare_topdemo(cfg);
  const auto v = build_kicked_top_spin1(p.c1, p.c4, p.period, p.c3);
  const std::vector<double> diag{0.0, 1.0, 2.0};
  const auto trace = evolve_trace(v, StateVector::basis(3, static_cast<Eigen::Index>(p.initial)), diag, p.kicks);
  Table t{"topdemo", {"n", "p0", "p1", "p2", "norm_drift"}, {}};
  for (std::size_t n = 0; n <= p.kicks; ++n)
    t.add_row({cell(n), cell(trace.populations[n][0]), cell(trace.populations[n][1]),
               cell(trace.populations[n][2]), cell(trace.norm_drift[n])});

  const ComplexMatrix l2 = spin1::gell_mann(2);
  const ComplexMatrix resid = l2 * l2 - (2.0 / 3.0) * ComplexMatrix::Identity(3, 3) -
                              (std::sqrt(3.0) / 3.0) * spin1::gell_mann(8);
  const auto dec = eigenphases(v);
  json side{{"c1", p.c1},
            {"c3", p.c3},
            {"c4", p.c4},
            {"period", p.period},
            {"eigenphases", dec.phases},
            {"unitarity_defect", v.unitarity_defect()},
            {"lambda2_identity_residual", max_abs(resid)}};
  return {table_artifact(t, cfg), json_artifact("topdemo.json", side)};
}

using Runner = std::vector<Artifact> (*)(const RunConfig&, std::size_t);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> r{
      {"bscan", run_bscan},       {"discrepancy", run_discrepancy}, {"weyl", run_weyl},
      {"dynamics", run_dynamics}, {"cantor", run_cantor},           {"phitilde", run_phitilde},
      {"deltaeps", run_deltaeps}, {"topdemo", run_topdemo},
  };
  return r;
}

void prepare(const RunConfig& cfg) {
  check_keys(cfg);
  const auto& s = cfg.subcommand;
  if (s == "bscan") (void)prepare_bscan(cfg);
  else if (s == "discrepancy") (void)prepare_discrepancy(cfg);
  else if (s == "weyl") (void)prepare_weyl(cfg);
  else if (s == "dynamics") (void)prepare_dynamics(cfg);
  else if (s == "cantor") (void)prepare_cantor(cfg);
  else if (s == "phitilde") (void)prepare_phitilde(cfg);
  else if (s == "deltaeps") (void)prepare_deltaeps(cfg);
  else if (s == "topdemo") (void)prepare_topdemo(cfg);
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"bscan", "discrepancy", "weyl",     "dynamics",
                                              "cantor", "phitilde",   "deltaeps", "topdemo"};
  return names;
}

const std::vector<std::pair<std::string, std::string>>& subcommand_keys(const std::string& name) {
  const auto it = key_table().find(name);
  if (it == key_table().end()) throw ConfigError("unknown subcommand '" + name + "'");
  return it->second;
}

void validate(const RunConfig& config) {
  try {
    prepare(config);
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

std::vector<Artifact> run_command(const RunConfig& config, std::size_t threads) {
  validate(config);
  std::vector<Artifact> out;
  try {
    out = runners().at(config.subcommand)(config, resolve_threads(threads));
  } catch (const ConfigError&) {
    throw;
  } catch (const ResourceGuardError&) {
    throw;
  }
  return out;
}

int exit_code_for_current_exception(std::string& message) {
  try {
    throw;
  } catch (const ConfigError& e) {
    message = e.what();
    return kExitConfig;
  } catch (const ResourceGuardError& e) {
    message = e.what();
    return kExitResource;
  } catch (const std::bad_alloc&) {
    message = "out of memory";
    return kExitResource;
  } catch (const std::exception& e) {
    message = e.what();
    return kExitNumeric;
  } catch (...) {
    message = "unknown error";
    return kExitNumeric;
  }
}

}  // namespace floquetlab::cli
