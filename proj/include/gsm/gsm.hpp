/// Umbrella header for the Gaussian sequence model library.
#pragma once

#include "gsm/bounds.hpp"
#include "gsm/config.hpp"
#include "gsm/estimators.hpp"
#include "gsm/montecarlo.hpp"
#include "gsm/risk.hpp"
#include "gsm/rng.hpp"
#include "gsm/sequence_model.hpp"
#include "gsm/version.hpp"
