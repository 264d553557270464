#pragma once

#include "patchflow/analysis.hpp"
#include "patchflow/cde.hpp"
#include "patchflow/config.hpp"
#include "patchflow/diagnostics.hpp"
#include "patchflow/ellipse_oracle.hpp"
#include "patchflow/ellipse_state.hpp"
#include "patchflow/field.hpp"
#include "patchflow/geometry.hpp"
#include "patchflow/io.hpp"
#include "patchflow/kernels.hpp"
#include "patchflow/parallel.hpp"
#include "patchflow/quadrature.hpp"
#include "patchflow/run.hpp"
#include "patchflow/spectral.hpp"
#include "patchflow/types.hpp"
