#pragma once

#include "dscharge/charges.hpp"
#include "dscharge/charts.hpp"
#include "dscharge/core.hpp"
#include "dscharge/derivative.hpp"
#include "dscharge/fields.hpp"
#include "dscharge/initial_data.hpp"
#include "dscharge/linalg.hpp"
#include "dscharge/models.hpp"
#include "dscharge/quadrature.hpp"
#include "dscharge/tensor.hpp"
