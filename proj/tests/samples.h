#pragma once

#include "ltesim/message.h"

#include <random>
#include <vector>

namespace ltesim::testing {

inline CellIdentity sample_cell(std::uint32_t id = 0x17, std::uint16_t tac = 0x1a2b)
{
  CellIdentity c;
  c.cell_id = id;
  c.tac = tac;
  c.enodeb_id = 0x3f;
  c.frequency_mhz = 1815.5;
  c.reselection_priority = 5;
  return c;
}

/// One instance of every message kind, with non-default fields where the kind has any.
std::vector<MessageBody> one_of_each();

/// Randomized record for round-trip properties; every field drawn from its full domain.
TraceRecord random_record(std::mt19937_64& rng);

}  // namespace ltesim::testing
