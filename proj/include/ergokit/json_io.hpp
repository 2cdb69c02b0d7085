// json_io.hpp — the wire formats: states, channels, channel families and
// classification reports. Complex numbers are [re, im] pairs.

#pragma once

#include "ergokit/certify.hpp"
#include "ergokit/channels.hpp"
#include "ergokit/types.hpp"

#include "json.hpp"

namespace ergokit {

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

struct StateFile {
  Hamiltonian hamiltonian;
  DensityMatrix rho;
};

// {"dim": d, "hamiltonian": {"eigenvalues": [...], "basis": ... | null}, "rho": [...]}
nlohmann::json state_to_json(const Hamiltonian& h, const DensityMatrix& rho);
StateFile state_from_json(const nlohmann::json& j);

// {"dim": d, "label": "...", "kraus": [...]}
nlohmann::json channel_to_json(const KrausChannel& ch);
KrausChannel channel_from_json(const nlohmann::json& j);

// Families are declared by name + parameters, e.g.
// {"family": "lambda_beta_tilde", "offset": 0.5} or {"family": "extraction"}.
bool json_is_family(const nlohmann::json& j);
AnyChannel any_channel_from_json(const nlohmann::json& j, const Hamiltonian& h);

nlohmann::json verdict_to_json(const ConditionVerdict& v, const Hamiltonian& h);
nlohmann::json eta_to_json(const EtaEstimate& e, const Hamiltonian& h);
nlohmann::json report_to_json(const ClassificationReport& rep, const Hamiltonian& h);

}  // namespace ergokit
