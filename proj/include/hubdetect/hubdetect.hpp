#pragma once

#include "agreement.hpp"
#include "errors.hpp"
#include "evaluation.hpp"
#include "generators.hpp"
#include "hubset.hpp"
#include "io.hpp"
#include "mdl.hpp"
#include "metrics.hpp"
#include "pipeline.hpp"
#include "powerlaw.hpp"
#include "rng.hpp"
#include "sdg.hpp"
#include "strength.hpp"
#include "threshold.hpp"
