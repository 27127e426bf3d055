#pragma once

#include "cylwave/asymptotics.hpp"
#include "cylwave/cli.hpp"
#include "cylwave/coefficients.hpp"
#include "cylwave/common.hpp"
#include "cylwave/config.hpp"
#include "cylwave/diagnostics.hpp"
#include "cylwave/fft.hpp"
#include "cylwave/freewave.hpp"
#include "cylwave/geometry.hpp"
#include "cylwave/grid.hpp"
#include "cylwave/identities.hpp"
#include "cylwave/reports.hpp"
#include "cylwave/scalars.hpp"
#include "cylwave/smallmat.hpp"
#include "cylwave/solver.hpp"
#include "cylwave/system_ops.hpp"
