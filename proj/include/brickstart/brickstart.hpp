#pragma once

// Everything except photo scanning (brickstart/vision.hpp, needs OpenCV).

#include "brickstart/error.hpp"
#include "brickstart/grid.hpp"
#include "brickstart/mesh.hpp"
#include "brickstart/meshops.hpp"
#include "brickstart/obj.hpp"
#include "brickstart/pipeline.hpp"
#include "brickstart/project.hpp"
#include "brickstart/reconstruct.hpp"
#include "brickstart/report.hpp"
#include "brickstart/stage_params.hpp"
#include "brickstart/status.hpp"
