#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "harness/dual.hpp"
#include "harness/dynamics.hpp"
#include "harness/gibbs.hpp"
#include "harness/ground_state.hpp"
#include "harness/hamiltonian.hpp"
#include "harness/lattice.hpp"
#include "harness/verify.hpp"

namespace harness::io {

using json = nlohmann::ordered_json;

Site site_from_json(const json& j);
json site_to_json(const Site& s);

/// {"dim":1,"range":2,"offsets":{"1":0.5,"-1":0.5}}; multi-dimensional
/// offset keys are comma separated ("1,0"). {"type":"nearest-neighbor",
/// "dim":d} is shorthand for the uniform nearest-neighbor kernel.
Kernel kernel_from_json(const json& j);
json kernel_to_json(const Kernel& k);

/// Field literal {"sites":[[0],[1]],"values":[0.0,1.0]} or a generator
/// evaluated on `domain`:
///   a bare number, or {"generator":"constant","value":c}
///   {"generator":"ramp","slope":s,"offset":o,"axis":a}   o + s * site[a]
///   {"generator":"delta","site":[...],"value":v}         v at one site, else 0
///   {"generator":"random","low":l,"high":h,"seed":n}     uniform, keyed by site
/// Literals are returned as written; coverage is checked by the consumer.
HeightField field_from_json(const json& j, std::span<const Site> domain);
json field_to_json(const HeightField& f);

Box box_from_json(const json& j, int dim);
json box_to_json(const Box& b);

json to_json(const EnergyBreakdown& e);
json to_json(const KernelRow& row);
json to_json(const DecayReport& r);
json to_json(const GroundStateResult& r);
json to_json(const InfiniteGroundState& r);
json to_json(const EpochList& epochs);
EpochList epochs_from_json(const json& j);
json to_json(const WeightTable& w);
json to_json(const Reconstruction& r);
json to_json(const GaussianSpec& spec);
json to_json(const CheckReport& r);

/// 17 significant digits, which parses back to the same double.
std::string format_double(double v);

/// CSV with one row per site: x0,...,x{d-1},<value_name>.
std::string field_to_csv(const HeightField& f, const std::string& value_name = "value");

}  // namespace harness::io
