#pragma once

#include "core.hpp"
#include "errors.hpp"
#include "export.hpp"
#include "expr.hpp"
#include "invariants.hpp"
#include "jet.hpp"
#include "mates.hpp"
#include "reconstruct.hpp"
#include "runner.hpp"
#include "sampled.hpp"
#include "scene.hpp"
#include "surface.hpp"
