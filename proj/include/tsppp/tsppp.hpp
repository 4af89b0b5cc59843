#pragma once

#include "tsppp/geometry.hpp"
#include "tsppp/environments.hpp"
#include "tsppp/instance_io.hpp"
#include "tsppp/roadmap.hpp"
#include "tsppp/search.hpp"
#include "tsppp/tsp.hpp"
#include "tsppp/diffusion.hpp"
#include "tsppp/pipeline.hpp"
#include "tsppp/metrics.hpp"
