#pragma once

#include <varmp/diagnostics.hpp>
#include <varmp/energy.hpp>
#include <varmp/errors.hpp>
#include <varmp/hypotheses.hpp>
#include <varmp/mesh.hpp>
#include <varmp/model_set.hpp>
#include <varmp/models.hpp>
#include <varmp/riesz.hpp>
#include <varmp/solver.hpp>
#include <varmp/spectrum.hpp>
#include <varmp/threads.hpp>
