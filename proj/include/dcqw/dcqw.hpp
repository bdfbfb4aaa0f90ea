#pragma once

#include "characteristics.hpp"
#include "coin.hpp"
#include "config.hpp"
#include "limits.hpp"
#include "linalg.hpp"
#include "spectral.hpp"
#include "walker.hpp"
