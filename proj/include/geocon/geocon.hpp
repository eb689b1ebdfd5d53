#pragma once

// Umbrella header.

#include "geocon/battery.hpp"
#include "geocon/catalog.hpp"
#include "geocon/congruence.hpp"
#include "geocon/errors.hpp"
#include "geocon/exprparse.hpp"
#include "geocon/geodesic_space.hpp"
#include "geocon/hypersurface.hpp"
#include "geocon/jet.hpp"
#include "geocon/pseudolinalg.hpp"
#include "geocon/reconstruct.hpp"
#include "geocon/report.hpp"
#include "geocon/spaceform.hpp"
