#pragma once

// Umbrella header: structural analysis, synthesis, and product-form solvers
// for Markovian Petri nets.

#include "pfpn/error.hpp"
#include "pfpn/json_io.hpp"
#include "pfpn/linalg.hpp"
#include "pfpn/markov.hpp"
#include "pfpn/net.hpp"
#include "pfpn/pi3.hpp"
#include "pfpn/rational.hpp"
#include "pfpn/reach.hpp"
#include "pfpn/reaction.hpp"
#include "pfpn/structural.hpp"
#include "pfpn/synthesis.hpp"
#include "pfpn/traffic.hpp"
