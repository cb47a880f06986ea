#pragma once

#include "hhe/kinetics.hpp"
#include "hhe/cells.hpp"
#include "hhe/integrator.hpp"
#include "hhe/energetics.hpp"
#include "hhe/sweep.hpp"
#include "hhe/io.hpp"
