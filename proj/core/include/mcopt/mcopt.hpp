#pragma once

#include "mcopt/acquisition.hpp"
#include "mcopt/bbo.hpp"
#include "mcopt/dataset.hpp"
#include "mcopt/errors.hpp"
#include "mcopt/experiment.hpp"
#include "mcopt/forest.hpp"
#include "mcopt/gp.hpp"
#include "mcopt/multicloud.hpp"
#include "mcopt/rbf.hpp"
#include "mcopt/report.hpp"
#include "mcopt/space.hpp"
