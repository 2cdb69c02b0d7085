#include "ergokit/json_io.hpp"

#include <stdexcept>

namespace ergokit {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) {
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix: expected a nonempty array");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.at(0).size());
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json& row = j.at(i);
    if (static_cast<int>(row.size()) != cols) {
      throw std::invalid_argument("matrix: ragged rows");
    }
    for (int c = 0; c < cols; ++c) {
      const json& z = row.at(c);
      if (!z.is_array() || z.size() != 2) {
        throw std::invalid_argument("matrix: complex entries must be [re, im]");
      }
      m(i, c) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
    }
  }
  return m;
}

json state_to_json(const Hamiltonian& h, const DensityMatrix& rho) {
  json out;
  out["dim"] = h.dim();
  json ham;
  ham["eigenvalues"] = std::vector<double>(h.eigenvalues().data(),
                                           h.eigenvalues().data() + h.dim());
  ham["basis"] = h.has_custom_basis() ? matrix_to_json(h.basis()) : json(nullptr);
  out["hamiltonian"] = std::move(ham);
  out["rho"] = matrix_to_json(rho.matrix());
  return out;
}

StateFile state_from_json(const json& j) {
  const int d = j.at("dim").get<int>();
  const json& ham = j.at("hamiltonian");
  const auto evs = ham.at("eigenvalues").get<std::vector<double>>();
  if (static_cast<int>(evs.size()) != d) {
    throw std::invalid_argument("state: eigenvalue count differs from dim");
  }
  RealVector eps = Eigen::Map<const RealVector>(evs.data(), d);
  const bool has_basis = ham.contains("basis") && !ham.at("basis").is_null();
  Hamiltonian h = has_basis ? Hamiltonian(eps, matrix_from_json(ham.at("basis")))
                            : Hamiltonian(eps);
  Matrix rho = matrix_from_json(j.at("rho"));
  if (rho.rows() != d) throw std::invalid_argument("state: rho dimension differs from dim");
  return {std::move(h), DensityMatrix(rho)};
}

json channel_to_json(const KrausChannel& ch) {
  json out;
  out["dim"] = ch.dim();
  out["label"] = ch.label();
  json kraus = json::array();
  for (const Matrix& k : ch.kraus()) kraus.push_back(matrix_to_json(k));
  out["kraus"] = std::move(kraus);
  return out;
}

KrausChannel channel_from_json(const json& j) {
  const int d = j.at("dim").get<int>();
  std::vector<Matrix> kraus;
  for (const json& k : j.at("kraus")) {
    Matrix m = matrix_from_json(k);
    if (m.rows() != d || m.cols() != d) {
      throw std::invalid_argument("channel: Kraus operator dimension differs from dim");
    }
    kraus.push_back(std::move(m));
  }
  return KrausChannel(std::move(kraus), j.value("label", std::string()));
}

bool json_is_family(const json& j) { return j.contains("family"); }

AnyChannel any_channel_from_json(const json& j, const Hamiltonian& h) {
  if (!json_is_family(j)) return channel_from_json(j);
  const std::string name = j.at("family").get<std::string>();
  if (name == "extraction") return extraction_family(h);
  if (name == "lambda_beta_tilde") {
    return lambda_beta_tilde_family(h, j.value("offset", 0.0));
  }
  throw std::invalid_argument("unknown channel family: " + name);
}

json verdict_to_json(const ConditionVerdict& v, const Hamiltonian& h) {
  json out;
  out["condition"] = v.condition;
  out["status"] = v.pass ? "pass" : "fail";
  out["trials"] = v.trials;
  out["note"] = v.note;
  if (v.counterexample) {
    const CounterexampleRecord& c = *v.counterexample;
    json ce;
    if (c.state) ce["state"] = state_to_json(h, *c.state);
    if (c.free_populations) {
      ce["free_populations"] = std::vector<double>(
          c.free_populations->data(), c.free_populations->data() + c.free_populations->size());
    }
    if (c.beta) ce["beta"] = *c.beta;
    ce["lhs"] = c.lhs;
    ce["rhs"] = c.rhs;
    ce["margin"] = c.margin;
    ce["index"] = c.index;
    out["counterexample"] = std::move(ce);
  }
  return out;
}

json eta_to_json(const EtaEstimate& e, const Hamiltonian& h) {
  json out;
  out["gamma_beta"] = e.gamma_beta;
  out["eta"] = e.eta;
  out["t_out"] = std::isfinite(e.t_out) ? json(e.t_out) : json("infinite");
  out["fit_residual"] = e.fit_residual;
  out["flagged"] = e.flagged;
  out["starts"] = e.starts;
  out["argmax_state"] = state_to_json(h, e.argmax_state);
  return out;
}

json report_to_json(const ClassificationReport& rep, const Hamiltonian& h) {
  json out;
  out["channel"] = rep.channel;
  out["theory"] = rep.theory;
  json verdicts = json::array();
  for (const ConditionVerdict& v : rep.verdicts) verdicts.push_back(verdict_to_json(v, h));
  out["verdicts"] = std::move(verdicts);
  json eta = json::array();
  for (const EtaEstimate& e : rep.eta) eta.push_back(eta_to_json(e, h));
  out["eta"] = std::move(eta);
  out["seed"] = rep.seed;
  out["trials"] = rep.trials;
  return out;
}

}  // namespace ergokit
