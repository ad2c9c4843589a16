#pragma once

// JSON shape specifications:
//   {"kind": "exp_decay",      "gamma": G, "detuning": dw, "start": t0}
//   {"kind": "exp_decay_sine", "gamma": G, "omega": w, "start": t0}
//   {"kind": "gaussian",       "width": G, "delay": tau0}
//   {"kind": "sampled", "grid": {"t_min", "t_max", "n_points"}, "values": [[re, im], ...]}
// "detuning", "start" and "delay" default to 0.

#include <json.hpp>

#include "biphoton/waveforms.hpp"

namespace biphoton {

nlohmann::json grid_to_json(const TimeGrid& grid);
TimeGrid grid_from_json(const nlohmann::json& j);

nlohmann::json shape_to_json(const TemporalShape& shape);
/// Throws InvalidArgument on unknown kinds, missing fields or non-numeric values.
TemporalShape shape_from_json(const nlohmann::json& j);

}  // namespace biphoton
