#include "uavvlc/trace.hpp"

#include <cstdio>
#include <ostream>

namespace uavvlc {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_trace_csv(std::ostream& out, const EpisodeTrace& trace, const std::string& config_hash) {
  const std::size_t k_users = trace.slots.empty() ? 0 : trace.slots.front().rates.size();
  out << "# config_hash=" << config_hash << '\n';
  out << "slot,reward,p_transmit,p_bias,p_circuit,p_propulsion,p_total";
  for (std::size_t k = 0; k < k_users; ++k) out << ",rate_" << k;
  out << ",sum_rate,energy_efficiency";
  for (int c = 1; c <= 9; ++c) out << ",c" << c;
  out << ",x,y,z,vx,vy,vz\n";
  for (const SlotRecord& r : trace.slots) {
    out << r.slot << ',' << num(r.reward) << ',' << num(r.power.transmit) << ',' << num(r.power.bias) << ','
        << num(r.power.circuit) << ',' << num(r.power.propulsion) << ',' << num(r.power.total);
    for (double rate : r.rates) out << ',' << num(rate);
    out << ',' << num(r.sum_rate) << ',' << num(r.energy_efficiency);
    for (int c = 1; c <= 9; ++c) out << ',' << (r.feasibility[c] ? 1 : 0);
    out << ',' << num(r.position.x) << ',' << num(r.position.y) << ',' << num(r.position.z) << ','
        << num(r.velocity.x()) << ',' << num(r.velocity.y()) << ',' << num(r.velocity.z()) << '\n';
  }
}

}  // namespace uavvlc
