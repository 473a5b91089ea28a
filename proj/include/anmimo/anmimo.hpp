#pragma once

#include "anmimo/closed_form.hpp"
#include "anmimo/common.hpp"
#include "anmimo/experiments.hpp"
#include "anmimo/matrix_rand.hpp"
#include "anmimo/parallel.hpp"
#include "anmimo/quantizer.hpp"
#include "anmimo/rng.hpp"
#include "anmimo/secrecy_mc.hpp"
#include "anmimo/special_functions.hpp"
#include "anmimo/system_model.hpp"
