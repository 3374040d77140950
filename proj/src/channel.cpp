#include "relaysim/channel.hpp"

namespace relaysim {

ChannelMatrix draw_channel_matrix(RngStream& rng, int num_antennas) {
  ChannelMatrix h(num_antennas, num_antennas);
  // Column-major fill so the draw order matches Eigen's storage order.
  for (int c = 0; c < num_antennas; ++c)
    for (int r = 0; r < num_antennas; ++r) h(r, c) = rng.complex_gaussian(1.0);
  return h;
}

ChannelSet draw_channel_set(RngStream& rng, int num_antennas, int num_relays,
                            std::uint64_t slot_index) {
  ChannelSet set;
  set.slot_index = slot_index;
  set.h_sd = draw_channel_matrix(rng, num_antennas);
  set.h_sr.reserve(static_cast<std::size_t>(num_relays));
  set.h_rd.reserve(static_cast<std::size_t>(num_relays));
  for (int j = 0; j < num_relays; ++j) set.h_sr.push_back(draw_channel_matrix(rng, num_antennas));
  for (int j = 0; j < num_relays; ++j) set.h_rd.push_back(draw_channel_matrix(rng, num_antennas));
  return set;
}

ComplexVector add_noise(const ComplexVector& signal, const NoiseModel& noise, RngStream& rng) {
  if (noise.n0 == 0.0) return signal;
  ComplexVector out = signal;
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += rng.complex_gaussian(noise.n0);
  return out;
}

}  // namespace relaysim
