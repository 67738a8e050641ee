#pragma once

#include "rsmc/config.hpp"
#include "rsmc/convergence.hpp"
#include "rsmc/ctmc.hpp"
#include "rsmc/discrete_model.hpp"
#include "rsmc/errors.hpp"
#include "rsmc/generator.hpp"
#include "rsmc/io.hpp"
#include "rsmc/limit_model.hpp"
#include "rsmc/model.hpp"
#include "rsmc/parallel.hpp"
#include "rsmc/report.hpp"
#include "rsmc/returns.hpp"
#include "rsmc/rng.hpp"
#include "rsmc/runner.hpp"
#include "rsmc/stats.hpp"
