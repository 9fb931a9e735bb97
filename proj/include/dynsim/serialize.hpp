#pragma once

#include <json.hpp>

#include "dynsim/schedule.hpp"

namespace dynsim {

using ordered_json = nlohmann::ordered_json;

/// Per-qubit ["+X","+Z"]-style image pairs.
ordered_json layer_to_json(const CliffordLayer& layer);
CliffordLayer layer_from_json(const ordered_json& arr);

/// {basis_change, layers (per-qubit Pauli letters), segments}.
ordered_json schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const ordered_json& j);

/// [[coefficient, "XXI"], ...] in canonical order.
ordered_json hamiltonian_to_json(const Hamiltonian& h);

}  // namespace dynsim
