#pragma once
// Umbrella header.

#include "vdir/checkpoint.hpp"
#include "vdir/config.hpp"
#include "vdir/data.hpp"
#include "vdir/detect.hpp"
#include "vdir/dirichlet.hpp"
#include "vdir/error.hpp"
#include "vdir/experiment.hpp"
#include "vdir/net.hpp"
#include "vdir/objective.hpp"
#include "vdir/report.hpp"
#include "vdir/rng.hpp"
#include "vdir/specfn.hpp"
#include "vdir/trainer.hpp"
