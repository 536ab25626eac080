#pragma once

#include "otsm/builders.hpp"
#include "otsm/certificate.hpp"
#include "otsm/core.hpp"
#include "otsm/experiment.hpp"
#include "otsm/solver.hpp"
