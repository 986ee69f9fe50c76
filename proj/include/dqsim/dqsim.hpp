#pragma once

#include "dqsim/linalg.hpp"
#include "dqsim/models.hpp"
#include "dqsim/circuit.hpp"
#include "dqsim/compiler.hpp"
#include "dqsim/timing.hpp"
#include "dqsim/noise.hpp"
#include "dqsim/tomography.hpp"
#include "dqsim/schedule.hpp"
#include "dqsim/spectrum.hpp"
#include "dqsim/experiments.hpp"
