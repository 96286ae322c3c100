#pragma once

#include "xbar/config.hpp"
#include "xbar/crossbar.hpp"
#include "xbar/device.hpp"
#include "xbar/errors.hpp"
#include "xbar/readout.hpp"
#include "xbar/solver.hpp"
#include "xbar/sweep.hpp"
