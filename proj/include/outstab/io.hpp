#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "outstab/certkit.hpp"
#include "outstab/dads.hpp"
#include "outstab/dynsys.hpp"
#include "outstab/probes.hpp"
#include "outstab/rates.hpp"

namespace outstab::io {

using nlohmann::json;

// Serializer with doubles pinned to 17 significant digits and sorted keys,
// so identical values give identical bytes.
std::string dump_json_17(const json& j, int indent = 2);
void write_json_17(const json& j, std::ostream& os, int indent = 2);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(const json& j);

// Header t,x1..xn,y1..yk; one row per sample.
void trajectory_csv(const dynsys::Trajectory& traj, std::ostream& os);
json trajectory_json(const dynsys::Trajectory& traj);

json to_json(const certkit::Verdict& v);
json to_json(const rates::ConvergenceBound& b);
json to_json(const probes::UniformityReport& r);
json to_json(const probes::QucReport& r);
json to_json(const probes::BarbalatReport& r);
json to_json(const probes::KLEnvelope& e);
json to_json(const probes::FalsifyWitness& w);
json to_json(const dads::DadsPropertyReport& r);
json to_json(const dads::ThetaThreshold& t);

// rows = s_knots, columns = t_knots.
void kl_envelope_csv(const probes::KLEnvelope& e, std::ostream& os);

// Two-column series export for plots.
void series_csv(const std::string& name, const std::vector<double>& t,
                const std::vector<double>& v, std::ostream& os);

}  // namespace outstab::io
