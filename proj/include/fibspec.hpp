#pragma once

#include "fibspec/bands.hpp"
#include "fibspec/error.hpp"
#include "fibspec/fractal.hpp"
#include "fibspec/operator.hpp"
#include "fibspec/serialize.hpp"
#include "fibspec/tracemap.hpp"
#include "fibspec/transfer.hpp"
#include "fibspec/verify.hpp"
#include "fibspec/words.hpp"
