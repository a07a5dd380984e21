#pragma once

#include "config.hpp"

namespace cli {

int run_price(const RunConfig& cfg);
int run_table(const RunConfig& cfg);
int run_boundary(const RunConfig& cfg);
int run_curves(const RunConfig& cfg);
int run_validate(const RunConfig& cfg);

// worker cap from GAMMA_PRICER_THREADS (default: hardware concurrency)
unsigned worker_count();

}  // namespace cli
