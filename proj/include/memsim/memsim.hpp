#pragma once

#include "memsim/analysis.hpp"
#include "memsim/device_state.hpp"
#include "memsim/drive.hpp"
#include "memsim/errors.hpp"
#include "memsim/model.hpp"
#include "memsim/port.hpp"
#include "memsim/root_find.hpp"
#include "memsim/scenario.hpp"
#include "memsim/solver.hpp"
#include "memsim/trace_io.hpp"
