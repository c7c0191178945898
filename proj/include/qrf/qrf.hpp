// qrf.hpp - umbrella header.
#pragma once

#include "qrf/linalg.hpp"
#include "qrf/spin.hpp"
#include "qrf/sectors.hpp"
#include "qrf/twirl.hpp"
#include "qrf/measures.hpp"
#include "qrf/virtual_obs.hpp"
#include "qrf/optimize.hpp"
#include "qrf/verify.hpp"
