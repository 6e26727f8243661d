#pragma once

// Umbrella header.

#include "vocot/box_scan.hpp"
#include "vocot/config.hpp"
#include "vocot/error.hpp"
#include "vocot/eval.hpp"
#include "vocot/filters.hpp"
#include "vocot/geometry.hpp"
#include "vocot/pipeline.hpp"
#include "vocot/program.hpp"
#include "vocot/prompts.hpp"
#include "vocot/records.hpp"
#include "vocot/scene.hpp"
#include "vocot/sequence.hpp"
#include "vocot/synthesis.hpp"
#include "vocot/text.hpp"
#include "vocot/thought.hpp"
#include "vocot/verbalizer.hpp"
