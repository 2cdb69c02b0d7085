// ergokit command line: compute work-extraction functionals, classify channels
// against the free-operation conditions, tabulate n-copy ergotropy densities
// and reproduce the worked d = 3 examples.
//
// Exit codes: 0 success/pass, 1 certified failure, 2 input error, 3 domain error.

#include "ergokit/certify.hpp"
#include "ergokit/channels.hpp"
#include "ergokit/geometry.hpp"
#include "ergokit/json_io.hpp"
#include "ergokit/spectra.hpp"
#include "ergokit/workfn.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using ergokit::AnyChannel;
using ergokit::Beta;
using ergokit::DensityMatrix;
using ergokit::Hamiltonian;
using ergokit::Matrix;
using ergokit::PassiveState;
using ergokit::RealVector;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct Options {
  std::uint64_t seed = 42;
  std::int64_t trials = 1000;
  double tol = 1e-8;
  double beta_min = 0.05;
  double beta_max = 20.0;
  int beta_points = 8;
  bool beta_linear = false;
  std::int64_t ncopy_cap = 2000000;
  int starts = 12;
  std::string out;
  std::string format = "json";
};

json provenance(const Options& opt) {
  json p;
  p["seed"] = opt.seed;
  p["trials"] = opt.trials;
  p["tolerance"] = opt.tol;
  p["beta_grid"] = {{"min", opt.beta_min},
                    {"max", opt.beta_max},
                    {"points", opt.beta_points},
                    {"log_spaced", !opt.beta_linear}};
  p["starts"] = opt.starts;
  p["version"] = kVersion;
  return p;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  json j;
  in >> j;
  return j;
}

void emit(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(opt.out);
  if (!out) throw std::invalid_argument("cannot write file: " + opt.out);
  out << text << "\n";
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Hamiltonian hamiltonian_from_file(const std::string& path) {
  const json j = load_json(path);
  const json& ham = j.contains("hamiltonian") ? j.at("hamiltonian") : j;
  const auto evs = ham.at("eigenvalues").get<std::vector<double>>();
  RealVector eps = Eigen::Map<const RealVector>(evs.data(), static_cast<int>(evs.size()));
  if (ham.contains("basis") && !ham.at("basis").is_null()) {
    return Hamiltonian(eps, ergokit::matrix_from_json(ham.at("basis")));
  }
  return Hamiltonian(eps);
}

json beta_to_json(const Beta& b) {
  return b.infinite ? json("infinite") : json(b.value);
}

int cmd_compute(const std::string& state_path, const std::string& what, double alpha,
                double nu, const Options& opt) {
  const ergokit::StateFile sf = ergokit::state_from_json(load_json(state_path));
  const Hamiltonian& h = sf.hamiltonian;
  const DensityMatrix& rho = sf.rho;

  json rep;
  rep["what"] = what;
  if (what == "ergotropy") {
    rep["value"] = ergokit::ergotropy(h, rho);
  } else if (what == "free-energy") {
    rep["value"] = ergokit::free_energy(h, rho);
  } else if (what == "beta") {
    const ergokit::BetaSolution sol = ergokit::beta_of_state(h, rho);
    rep["value"] = beta_to_json(sol.beta);
    rep["achieved_entropy"] = sol.achieved_entropy;
    rep["residual"] = sol.residual;
  } else if (what == "mcp" || what == "mp" || what == "family") {
    ergokit::MonotoneResult res =
        what == "mcp"   ? ergokit::monotone_Mcp(h, rho)
        : what == "mp"  ? ergokit::monotone_Mp(h, rho)
                        : ergokit::family_Mp(h, rho, alpha, nu, opt.seed);
    rep["value"] = res.value;
    rep["method"] = res.method;
    rep["minimizer"] = std::vector<double>(res.minimizer.data(),
                                           res.minimizer.data() + res.minimizer.size());
    if (res.beta) rep["beta"] = beta_to_json(*res.beta);
    if (what == "family") {
      rep["alpha"] = alpha;
      rep["nu"] = nu;
      ergokit::MonotoneResult cp = ergokit::family_Mcp(h, rho, alpha, nu);
      rep["value_cp"] = cp.value;
      rep["beta_cp"] = beta_to_json(*cp.beta);
    }
  } else {
    throw std::invalid_argument("unknown compute target: " + what);
  }
  rep["provenance"] = provenance(opt);

  if (opt.format == "csv") {
    std::ostringstream csv;
    csv << "what,value\n" << what << "," << fmt17(rep["value"].get<double>());
    emit(opt, csv.str());
  } else {
    emit(opt, rep.dump(2));
  }
  return 0;
}

int cmd_classify(const std::string& channel_path, const std::string& ham_path,
                 const std::string& theory, const Options& opt) {
  if (ham_path.empty()) {
    throw std::invalid_argument("classify requires --ham <file> for the Hamiltonian");
  }
  const Hamiltonian h = hamiltonian_from_file(ham_path);
  const AnyChannel ch = ergokit::any_channel_from_json(load_json(channel_path), h);

  ergokit::CertifyConfig cfg;
  cfg.trials = opt.trials;
  cfg.seed = opt.seed;
  cfg.tolerance = opt.tol;
  cfg.starts = opt.starts;
  cfg.beta_grid = ergokit::default_beta_grid(opt.beta_min, opt.beta_max, opt.beta_points,
                                             !opt.beta_linear);

  std::vector<std::string> theories;
  if (theory == "both") {
    theories = {"cp", "p"};
  } else if (theory == "cp" || theory == "p") {
    theories = {theory};
  } else {
    throw std::invalid_argument("theory must be cp, p or both");
  }

  // Membership is decided by the F/E conditions; strong monotonicity is a
  // property of the declared Kraus presentation and does not gate the verdict.
  const auto gates = [](const std::string& cond) {
    return cond == "F.i" || cond == "F.ii" || cond == "F.iii" || cond == "E.i" ||
           cond == "E.ii" || cond == "E.iii";
  };

  json out = json::array();
  bool any_fail = false;
  for (const std::string& t : theories) {
    const ergokit::ClassificationReport rep = ergokit::classify(
        ch, h, t == "cp" ? ergokit::Theory::CompletelyPassive : ergokit::Theory::Passive,
        cfg);
    for (const auto& v : rep.verdicts) any_fail = any_fail || (gates(v.condition) && !v.pass);
    json rj = ergokit::report_to_json(rep, h);
    rj["provenance"] = provenance(opt);
    out.push_back(std::move(rj));
  }
  emit(opt, theories.size() == 1 ? out[0].dump(2) : out.dump(2));
  return any_fail ? 1 : 0;
}

int cmd_ncopy(const std::string& state_path, int n_max, const Options& opt) {
  const ergokit::StateFile sf = ergokit::state_from_json(load_json(state_path));
  const Hamiltonian& h = sf.hamiltonian;
  const DensityMatrix& rho = sf.rho;

  const double f = ergokit::free_energy(h, rho);
  json rows = json::array();
  bool gap_nonincreasing = true;
  double prev_gap = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    const double density = ergokit::ergotropy_ncopy(h, rho, n, opt.ncopy_cap) / n;
    const double gap = f - density;
    gap_nonincreasing = gap_nonincreasing && gap <= prev_gap + 1e-9;
    prev_gap = gap;
    rows.push_back({{"n", n},
                    {"ergotropy_density", density},
                    {"free_energy", f},
                    {"gap", gap}});
  }

  if (opt.format == "csv") {
    std::ostringstream csv;
    csv << "n,ergotropy_density,free_energy,gap\n";
    for (const auto& r : rows) {
      csv << r["n"].get<int>() << "," << fmt17(r["ergotropy_density"].get<double>()) << ","
          << fmt17(r["free_energy"].get<double>()) << "," << fmt17(r["gap"].get<double>())
          << "\n";
    }
    csv << "# gap_nonincreasing=" << (gap_nonincreasing ? "true" : "false");
    emit(opt, csv.str());
  } else {
    json rep;
    rep["rows"] = rows;
    rep["gap_nonincreasing"] = gap_nonincreasing;
    rep["provenance"] = provenance(opt);
    emit(opt, rep.dump(2));
  }
  return 0;
}

json repro_d3_temperature() {
  RealVector eps(3);
  eps << 0.0, 0.0, 1.0;
  Hamiltonian h(eps);
  const DensityMatrix rho = [] {
    Matrix m = Matrix::Zero(3, 3);
    m(1, 1) = m(2, 2) = m(1, 2) = m(2, 1) = 0.5;
    return DensityMatrix(m);
  }();
  Matrix dm = rho.matrix();
  dm(1, 2) = dm(2, 1) = 0.0;
  const DensityMatrix dephased(dm);

  int agreements = 0, disagreements = 0;
  for (int i = 1; i < 50; ++i) {
    for (int j = 1; j < 50; ++j) {
      const double p1 = 1.0 / 3.0 + (i / 50.0) * (2.0 / 3.0);
      const double p2 = (j / 50.0) * std::min(p1, 1.0 - p1);
      const double p3 = 1.0 - p1 - p2;
      if (p3 <= 1e-6 || p3 > p2 + 1e-12 || p2 > p1 + 1e-12) continue;
      RealVector pv(3);
      pv << p1, p2, p3;
      const PassiveState p(pv);
      const bool predicate = std::log(p1 / p3) < std::log(p1 * p1 / (p2 * p3));
      const double t_in = ergokit::noneq_temperature(h, p, rho);
      const double t_out = ergokit::noneq_temperature(h, p, dephased);
      if (std::abs(t_out - t_in) <= 1e-9) continue;
      ((t_out > t_in) == predicate ? agreements : disagreements)++;
    }
  }
  json r;
  r["which"] = "d3-temperature";
  r["agreements"] = agreements;
  r["disagreements"] = disagreements;
  r["pass"] = disagreements == 0 && agreements > 0;
  return r;
}

json repro_d3_contractivity() {
  RealVector eps(3);
  eps << 0.0, 0.0, 1.0;
  Hamiltonian h(eps);
  Matrix m = Matrix::Zero(3, 3);
  m(1, 1) = m(2, 2) = m(1, 2) = m(2, 1) = 0.5;
  const DensityMatrix rho(m);
  m(1, 2) = m(2, 1) = 0.0;
  const DensityMatrix dephased(m);

  RealVector pv(3);
  pv << 0.6, 0.2, 0.2;
  const PassiveState p(pv);
  const double d_before = ergokit::distance_to_free(h, rho, p);
  const double d_after = ergokit::distance_to_free(h, dephased, p);

  json r;
  r["which"] = "d3-contractivity";
  r["distance_before"] = d_before;
  r["distance_after"] = d_after;
  r["pass"] = d_after > d_before;
  return r;
}

json repro_lambda_beta() {
  RealVector eps(3);
  eps << 0.0, 0.6, 1.5;
  Hamiltonian h(eps);
  const double beta = 0.8;
  const DensityMatrix sigma_prime = ergokit::gibbs(h, 2.2).to_density(h);
  const ergokit::KrausChannel lam = ergokit::lambda_beta_map(h, beta, sigma_prime);
  const Matrix gamma = ergokit::gibbs(h, beta).to_density(h).matrix();

  double worst = 0.0;
  for (int t = 0; t < 64; ++t) {
    const PassiveState p = ergokit::random_passive(h, 1000 + t);
    worst = std::max(worst,
                     ergokit::max_abs(ergokit::apply(lam, p.to_density(h)).matrix() - gamma));
  }
  for (double bprime : {0.0, 0.5, 1.0, 3.0, 10.0}) {
    worst = std::max(
        worst, ergokit::max_abs(
                   ergokit::apply(lam, ergokit::gibbs(h, bprime).to_density(h)).matrix() -
                   gamma));
  }
  json r;
  r["which"] = "lambda-beta";
  r["max_deviation"] = worst;
  r["pass"] = worst <= 1e-10;
  return r;
}

json repro_decomposition() {
  RealVector eps(3);
  eps << 0.0, 0.0, 1.0;
  Hamiltonian h(eps);
  Matrix m = Matrix::Zero(3, 3);
  m(1, 1) = m(2, 2) = m(1, 2) = m(2, 1) = 0.5;
  const DensityMatrix rho(m);

  const double f = ergokit::free_energy(h, rho);
  const double erg = ergokit::ergotropy(h, rho);
  const double f_passive =
      ergokit::free_energy_of(h, ergokit::spectral(rho).populations);

  bool random_ok = true;
  for (int t = 0; t < 200; ++t) {
    const DensityMatrix any = ergokit::random_state(
        3, ergokit::StateMeasure::HilbertSchmidt, ergokit::derive_seed(5000, t));
    random_ok =
        random_ok && ergokit::distance_decomposition_check(Hamiltonian(eps), any, 1e-8);
  }

  json r;
  r["which"] = "decomposition";
  r["free_energy"] = f;
  r["ergotropy"] = erg;
  r["free_energy_of_passive"] = f_passive;
  r["identity_gap"] = f - erg - f_passive;
  r["pass"] = std::abs(f - erg - f_passive) <= 1e-8 && random_ok;
  return r;
}

int cmd_repro(const std::string& which, const Options& opt) {
  json items = json::array();
  if (which == "d3-temperature" || which == "all") items.push_back(repro_d3_temperature());
  if (which == "d3-contractivity" || which == "all") items.push_back(repro_d3_contractivity());
  if (which == "lambda-beta" || which == "all") items.push_back(repro_lambda_beta());
  if (which == "decomposition" || which == "all") items.push_back(repro_decomposition());
  if (items.empty()) throw std::invalid_argument("unknown repro target: " + which);

  bool all_pass = true;
  for (const auto& i : items) all_pass = all_pass && i["pass"].get<bool>();
  json rep;
  rep["results"] = items;
  rep["pass"] = all_pass;
  rep["provenance"] = provenance(opt);
  emit(opt, rep.dump(2));
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergokit: ergotropy, free energy and free-operation certification"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  Options opt;
  app.add_option("--seed", opt.seed, "master seed");
  app.add_option("--trials", opt.trials, "sampling trials")->check(CLI::PositiveNumber);
  app.add_option("--tol", opt.tol, "violation tolerance")->check(CLI::PositiveNumber);
  app.add_option("--beta-min", opt.beta_min, "beta grid minimum");
  app.add_option("--beta-max", opt.beta_max, "beta grid maximum");
  app.add_option("--beta-points", opt.beta_points, "beta grid points");
  app.add_flag("--beta-linear", opt.beta_linear, "linear instead of log spacing");
  app.add_option("--ncopy-cap", opt.ncopy_cap, "cap on d^n");
  app.add_option("--starts", opt.starts, "optimizer starts");
  app.add_option("--out", opt.out, "output path (default stdout)");
  app.add_option("--format", opt.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string state_path, what = "ergotropy";
  double alpha = 1.0, nu = 1.0;
  auto* compute = app.add_subcommand("compute", "evaluate a functional of a state");
  compute->add_option("state", state_path, "state JSON file")->required();
  compute->add_option("--what", what,
                      "ergotropy | free-energy | beta | mcp | mp | family");
  compute->add_option("--alpha", alpha, "Tsallis order for --what family");
  compute->add_option("--nu", nu, "temperature exponent for --what family");

  std::string channel_path, ham_path, theory = "both";
  auto* classify = app.add_subcommand("classify", "certify a channel");
  classify->add_option("channel", channel_path, "channel or family JSON file")->required();
  classify->add_option("--ham", ham_path, "Hamiltonian (state file or bare spec)");
  classify->add_option("--theory", theory, "cp | p | both");

  std::string ncopy_state;
  int n_max = 4;
  auto* ncopy = app.add_subcommand("ncopy", "n-copy ergotropy density table");
  ncopy->add_option("state", ncopy_state, "state JSON file")->required();
  ncopy->add_option("--n-max", n_max, "largest copy count")->check(CLI::PositiveNumber);

  std::string which = "all";
  auto* repro = app.add_subcommand("repro", "reproduce the worked d=3 examples");
  repro->add_option("--which", which,
                    "d3-temperature | d3-contractivity | lambda-beta | decomposition | all");

  try {
    app.parse(argc, argv);
    if (compute->parsed()) return cmd_compute(state_path, what, alpha, nu, opt);
    if (classify->parsed()) return cmd_classify(channel_path, ham_path, theory, opt);
    if (ncopy->parsed()) return cmd_ncopy(ncopy_state, n_max, opt);
    if (repro->parsed()) return cmd_repro(which, opt);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
