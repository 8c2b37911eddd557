#pragma once

#include "catalog.hpp"
#include "clairaut.hpp"
#include "errors.hpp"
#include "fiber_chart.hpp"
#include "geodesic.hpp"
#include "geometry.hpp"
#include "report.hpp"
#include "submersion.hpp"
#include "verifier.hpp"
#include "warped_product.hpp"
#include "warped_submersion.hpp"
