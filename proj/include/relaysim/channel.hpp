#pragma once

#include "relaysim/rng.hpp"
#include "relaysim/types.hpp"

namespace relaysim {

// M x M matrix of i.i.d. CN(0, 1) gains (Rayleigh fading, unit channel power).
// Entries are drawn in column-major order.
ChannelMatrix draw_channel_matrix(RngStream& rng, int num_antennas);

// Fresh independent draw of every link for one slot, in the fixed order
// SD, SR_0..SR_{N-1}, RD_0..RD_{N-1}.
ChannelSet draw_channel_set(RngStream& rng, int num_antennas, int num_relays,
                            std::uint64_t slot_index = 0);

// clean + w with w_i ~ CN(0, n0). n0 = 0 adds exactly zero.
ComplexVector add_noise(const ComplexVector& clean, const NoiseModel& noise,
                        RngStream& rng);

}  // namespace relaysim
