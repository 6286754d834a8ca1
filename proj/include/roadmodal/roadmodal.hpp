#pragma once

#include "roadmodal/error.hpp"
#include "roadmodal/excitation.hpp"
#include "roadmodal/lag_transform.hpp"
#include "roadmodal/modal_core.hpp"
#include "roadmodal/oracle.hpp"
#include "roadmodal/road_surface.hpp"
#include "roadmodal/scenario.hpp"
#include "roadmodal/svg_plot.hpp"
#include "roadmodal/tvimm.hpp"
#include "roadmodal/vehicle_model.hpp"
