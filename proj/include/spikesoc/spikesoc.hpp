#pragma once

#include "spikesoc/batch.hpp"
#include "spikesoc/controller.hpp"
#include "spikesoc/core.hpp"
#include "spikesoc/decoder.hpp"
#include "spikesoc/encoder.hpp"
#include "spikesoc/error.hpp"
#include "spikesoc/flash_image.hpp"
#include "spikesoc/idx.hpp"
#include "spikesoc/model.hpp"
#include "spikesoc/oracle.hpp"
#include "spikesoc/perf.hpp"
#include "spikesoc/sorter.hpp"
#include "spikesoc/synth.hpp"
