#pragma once

// JSON and CSV serialization of witnesses, strategies, curves,
// decompositions and simulation reports. JSON objects are key-ordered so
// repeated runs produce byte-identical files.

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "entwit/classical.hpp"
#include "entwit/decomp.hpp"
#include "entwit/polsim.hpp"
#include "entwit/qopt.hpp"
#include "entwit/tomo.hpp"
#include "entwit/witness.hpp"

namespace entwit::io {

using Json = nlohmann::ordered_json;

/// printf "%.6g"; independent of the global locale.
std::string fmt6(double v);

/// {"n", "l", "alpha", "name"}; unknown keys and inconsistent shapes are
/// rejected with InvalidArgument.
Json to_json(const WitnessSpec& spec);
WitnessSpec witness_from_json(const Json& j);
/// A canonical name ("I3") or an inline object.
WitnessSpec witness_from_value(const Json& j);

Json to_json(const DeterministicStrategy& s);
/// [{"P", "E", "q"}, ...]
Json to_json(const StrategyMixture& m);
StrategyMixture mixture_from_json(const Json& j);

Json to_json(const RMatrix& m);
/// {"real": [[...]], "imag": [[...]]}
Json to_json(const CMatrix& m);
CMatrix cmatrix_from_json(const Json& j);

Json to_json(const OptimizationConfig& c);
/// Starts from `base` and overrides the keys present; unknown keys throw.
OptimizationConfig opt_config_from_json(const Json& j, OptimizationConfig base = {});
Json to_json(const SimConfig& c);
SimConfig sim_config_from_json(const Json& j, SimConfig base = {});

Json to_json(const EntropyCurve& c);
/// Header W,value,residual,starts_converged.
void write_curve_csv(std::ostream& os, const EntropyCurve& c);

Json to_json(const SplitResult& r);
Json to_json(const GapReport& g);
Json to_json(const ProtocolReport& r);
Json to_json(const ErrorBudget& b);

/// Header setting,D_ab,D_ad,D_cb,D_cd,duration.
void write_counts_csv(std::ostream& os, const std::vector<EventRecord>& events);

/// Header state_index,setting_index,count; indices are 0-based.
void write_tomography_csv(std::ostream& os, const TomographyDataset& data);
TomographyDataset read_tomography_csv(std::istream& is);

}  // namespace entwit::io
