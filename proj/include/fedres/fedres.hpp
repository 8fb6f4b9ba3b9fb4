#pragma once

// Umbrella header for the fault-resilient federated learning library.

#include "fedres/adversary.hpp"
#include "fedres/baselines.hpp"
#include "fedres/bounds.hpp"
#include "fedres/config.hpp"
#include "fedres/data.hpp"
#include "fedres/errors.hpp"
#include "fedres/experiment.hpp"
#include "fedres/frpg.hpp"
#include "fedres/lfrpg.hpp"
#include "fedres/loss.hpp"
#include "fedres/metrics.hpp"
#include "fedres/objective.hpp"
#include "fedres/params.hpp"
#include "fedres/penalty.hpp"
#include "fedres/rng.hpp"
#include "fedres/runner.hpp"
#include "fedres/schedule.hpp"
#include "fedres/synthetic.hpp"
#include "fedres/vec.hpp"
