#pragma once

#include "config.hpp"
#include "dominance.hpp"
#include "estimators.hpp"
#include "experiment.hpp"
#include "model.hpp"
#include "normal.hpp"
#include "predictive_density.hpp"
#include "quadrature.hpp"
#include "report.hpp"
#include "risk.hpp"
#include "rng.hpp"
#include "skew_normal.hpp"
#include "special.hpp"
#include "verify.hpp"
