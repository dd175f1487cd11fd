#pragma once

#include "qfe/campaign.hpp"
#include "qfe/config.hpp"
#include "qfe/csv.hpp"
#include "qfe/errors.hpp"
#include "qfe/fisher.hpp"
#include "qfe/posterior.hpp"
#include "qfe/probe.hpp"
#include "qfe/response.hpp"
#include "qfe/rng.hpp"
#include "qfe/sampled_function.hpp"
#include "qfe/simulate.hpp"
