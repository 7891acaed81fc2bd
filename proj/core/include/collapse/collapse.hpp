#pragma once

#include "collapse/chart.hpp"
#include "collapse/checkpoint.hpp"
#include "collapse/config.hpp"
#include "collapse/engine.hpp"
#include "collapse/error.hpp"
#include "collapse/markov_learner.hpp"
#include "collapse/monitor.hpp"
#include "collapse/numfmt.hpp"
#include "collapse/records.hpp"
#include "collapse/regulator.hpp"
#include "collapse/rng.hpp"
#include "collapse/sampling.hpp"
#include "collapse/softmax_classifier.hpp"
#include "collapse/sources.hpp"
#include "collapse/stats.hpp"
#include "collapse/summary.hpp"
#include "collapse/types.hpp"
