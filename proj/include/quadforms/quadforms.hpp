#pragma once

#include "quadforms/derivative.hpp"
#include "quadforms/error.hpp"
#include "quadforms/expr.hpp"
#include "quadforms/field.hpp"
#include "quadforms/forms.hpp"
#include "quadforms/io.hpp"
#include "quadforms/quad.hpp"
#include "quadforms/random.hpp"
#include "quadforms/tiling.hpp"
#include "quadforms/weil.hpp"
