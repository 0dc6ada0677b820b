#pragma once

// Umbrella header: the whole toolkit.

#include "duet/analysis.hpp"
#include "duet/association.hpp"
#include "duet/channel.hpp"
#include "duet/config.hpp"
#include "duet/delaunay.hpp"
#include "duet/graphcolor.hpp"
#include "duet/jets.hpp"
#include "duet/point.hpp"
#include "duet/quadrature.hpp"
#include "duet/regions.hpp"
#include "duet/report.hpp"
#include "duet/rng.hpp"
#include "duet/simrunner.hpp"
#include "duet/special.hpp"
#include "duet/topology.hpp"
