#pragma once

// Umbrella header: the whole library.

#include "stlearn/assoc.hpp"
#include "stlearn/binio.hpp"
#include "stlearn/config.hpp"
#include "stlearn/core.hpp"
#include "stlearn/dataset_io.hpp"
#include "stlearn/embed.hpp"
#include "stlearn/eval.hpp"
#include "stlearn/jsonio.hpp"
#include "stlearn/loss.hpp"
#include "stlearn/manifest.hpp"
#include "stlearn/memory.hpp"
#include "stlearn/report_io.hpp"
#include "stlearn/rng.hpp"
#include "stlearn/synthgen.hpp"
#include "stlearn/trainer.hpp"
#include "stlearn/vec.hpp"
#include "stlearn/version.hpp"
