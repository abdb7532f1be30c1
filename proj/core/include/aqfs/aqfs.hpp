#pragma once

#include "aqfs/baselines.hpp"
#include "aqfs/basis.hpp"
#include "aqfs/error.hpp"
#include "aqfs/parallel.hpp"
#include "aqfs/qbic.hpp"
#include "aqfs/qrsolve.hpp"
#include "aqfs/rng.hpp"
#include "aqfs/score.hpp"
#include "aqfs/screening.hpp"
#include "aqfs/simlab.hpp"
