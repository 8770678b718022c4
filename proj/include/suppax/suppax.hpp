// Copyright (c) 2026, The suppax authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "suppax/analysis/parzen.hpp"
#include "suppax/analysis/regions.hpp"
#include "suppax/analysis/separability.hpp"
#include "suppax/analysis/weights.hpp"
#include "suppax/autograd.hpp"
#include "suppax/checkpoint.hpp"
#include "suppax/data.hpp"
#include "suppax/errors.hpp"
#include "suppax/experiments.hpp"
#include "suppax/gan.hpp"
#include "suppax/idx.hpp"
#include "suppax/matrix.hpp"
#include "suppax/nn.hpp"
#include "suppax/report.hpp"
#include "suppax/rng.hpp"
