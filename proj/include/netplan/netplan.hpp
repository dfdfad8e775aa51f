#ifndef NETPLAN_NETPLAN_HPP
#define NETPLAN_NETPLAN_HPP

#include "netplan/demand.hpp"
#include "netplan/errors.hpp"
#include "netplan/geometry.hpp"
#include "netplan/io.hpp"
#include "netplan/loadmodel.hpp"
#include "netplan/mapping.hpp"
#include "netplan/pipeline.hpp"
#include "netplan/planner.hpp"
#include "netplan/powopt.hpp"
#include "netplan/scenario.hpp"
#include "netplan/svg.hpp"

#endif
