#pragma once

#include "dfpower/errors.hpp"
#include "dfpower/graph_core.hpp"
#include "dfpower/dynamics.hpp"
#include "dfpower/topology.hpp"
#include "dfpower/analysis.hpp"
#include "dfpower/io.hpp"
#include "dfpower/harness.hpp"
