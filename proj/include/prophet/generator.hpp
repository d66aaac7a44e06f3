#pragma once

#include <cstdint>
#include <string>

#include "prophet/isa.hpp"

namespace prophet {

struct GeneratorOptions {
  uint64_t seed = 0;
  int max_instructions = 200;
};

// Produces a random, valid, terminating program. The same seed always yields
// the same program. Generated programs mix straight-line code, counted loops,
// spawn chains and spawn-in-loop regions, with p-slices ranging from perfect
// to stale to empty, plus deliberate cross-thread store/load races; they are
// meant to be thrown at the equivalence check in bulk.
std::string generate_program_text(const GeneratorOptions& opts);

// parse_program(generate_program_text(opts)).
Program generate_program(const GeneratorOptions& opts);

}  // namespace prophet
