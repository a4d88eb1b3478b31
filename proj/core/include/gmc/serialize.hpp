#pragma once

#include <string>

#include "gmc/field_sampler.hpp"
#include "gmc/geometry.hpp"
#include "gmc/kernels.hpp"

// Single-header nlohmann/json from vendor/ on the include path.
#include "json.hpp"

namespace gmc {

using json = nlohmann::json;

/// JSON forms:
///   {"variant":"l_exact","L":1.0,"d":1}
///   {"variant":"reference","d":3}
///   {"variant":"composite","d":2,"f":"constant","params":{"value":0.5}}
/// Composite f must name a registry entry ("zero", "constant",
/// "gaussian_bump"); arbitrary closures cannot round-trip.
json kernel_to_json(const KernelDescriptor& k);
KernelDescriptor kernel_from_json(const json& j);

json box_to_json(const Box& b, int d);
Box box_from_json(const json& j, int* d_out = nullptr);

json set_to_json(const SetSpec& s, int d);
SetSpec set_from_json(const json& j);

json density_to_json(const DensitySpec& g);
DensitySpec density_from_json(const json& j);

json grid_to_json(const GridSpec& g);
GridSpec grid_from_json(const json& j);

/// Dotted-path override "a.b.c=value"; value parsed as JSON when possible,
/// else taken as a string.
void apply_override(json& config, const std::string& assignment);

}  // namespace gmc
