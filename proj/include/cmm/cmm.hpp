#pragma once

#include "cmm/config.hpp"
#include "cmm/cubic.hpp"
#include "cmm/entanglement.hpp"
#include "cmm/error.hpp"
#include "cmm/linearized.hpp"
#include "cmm/meanfield_ode.hpp"
#include "cmm/model.hpp"
#include "cmm/steady_state.hpp"
#include "cmm/sweep.hpp"
#include "cmm/validate.hpp"
