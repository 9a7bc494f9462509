#pragma once

#include "lawrisk/consistency.hpp"
#include "lawrisk/continuity_lab.hpp"
#include "lawrisk/distribution.hpp"
#include "lawrisk/error.hpp"
#include "lawrisk/measures.hpp"
#include "lawrisk/orlicz.hpp"
#include "lawrisk/parse.hpp"
#include "lawrisk/processes.hpp"
#include "lawrisk/quadrature.hpp"
#include "lawrisk/spectrum.hpp"
#include "lawrisk/version.hpp"
