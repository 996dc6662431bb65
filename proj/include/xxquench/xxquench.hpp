#ifndef XXQUENCH_XXQUENCH_HPP
#define XXQUENCH_XXQUENCH_HPP

#define XXQUENCH_VERSION "0.1.0"

#include "dense.hpp"
#include "errors.hpp"
#include "jacobi.hpp"
#include "rng.hpp"
#include "lattice.hpp"
#include "propagator.hpp"
#include "correlator.hpp"
#include "rdm.hpp"
#include "entanglement.hpp"
#include "evolution.hpp"
#include "parallel.hpp"
#include "disorder.hpp"
#include "analysis.hpp"
#include "oracle.hpp"

#endif
