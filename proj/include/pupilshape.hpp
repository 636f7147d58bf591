#pragma once

#include "pupilshape/band.hpp"
#include "pupilshape/batch.hpp"
#include "pupilshape/biou.hpp"
#include "pupilshape/ellipse.hpp"
#include "pupilshape/error.hpp"
#include "pupilshape/eval.hpp"
#include "pupilshape/image_io.hpp"
#include "pupilshape/manifest.hpp"
#include "pupilshape/pipeline.hpp"
#include "pupilshape/raster.hpp"
#include "pupilshape/segment.hpp"
#include "pupilshape/serialize.hpp"
#include "pupilshape/synth.hpp"
