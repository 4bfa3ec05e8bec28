#pragma once

#include "catalog.hpp"
#include "classify.hpp"
#include "constructions.hpp"
#include "errors.hpp"
#include "geodesy.hpp"
#include "invariants.hpp"
#include "metric.hpp"
#include "random.hpp"
