#pragma once

#include "btadapt/config.hpp"
#include "btadapt/fire.hpp"
#include "btadapt/harness.hpp"
#include "btadapt/node.hpp"
#include "btadapt/physics.hpp"
#include "btadapt/policy.hpp"
#include "btadapt/report.hpp"
#include "btadapt/rng.hpp"
#include "btadapt/stats.hpp"
#include "btadapt/terrain.hpp"
