// csq.hpp: umbrella header

#pragma once

#include "csq/analytic.hpp"
#include "csq/audit.hpp"
#include "csq/config.hpp"
#include "csq/dynamics.hpp"
#include "csq/errors.hpp"
#include "csq/frame_check.hpp"
#include "csq/model.hpp"
#include "csq/observables.hpp"
#include "csq/operators.hpp"
#include "csq/runner.hpp"
#include "csq/space.hpp"
#include "csq/spectrum.hpp"
#include "csq/truncation.hpp"
#include "csq/validation.hpp"
