#pragma once

#include "mimo/seed.hpp"
#include "mimo/constellation.hpp"
#include "mimo/channel.hpp"
#include "mimo/instance_io.hpp"
#include "mimo/ising_map.hpp"
#include "mimo/schedule.hpp"
#include "mimo/replicas.hpp"
#include "mimo/bpim.hpp"
#include "mimo/dpim.hpp"
#include "mimo/oim.hpp"
#include "mimo/baselines.hpp"
#include "mimo/sphere_decoder.hpp"
#include "mimo/stats.hpp"
#include "mimo/plan.hpp"
#include "mimo/ber_sweep.hpp"
#include "mimo/beta_sweep.hpp"
#include "mimo/report.hpp"
